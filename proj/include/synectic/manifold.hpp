#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synectic/errors.hpp"
#include "synectic/expr.hpp"
#include "synectic/jet.hpp"

namespace synectic {

// A scalar component function on the base manifold, evaluable either as a
// plain value or as a second-order jet in the base coordinates.  Both
// entry points run the same underlying code (expression tree or C++
// closure), so the value path is what finite-difference oracles probe.
struct ScalarField {
    std::function<double(std::span<const double>)> value;
    std::function<Jet2(std::span<const double>)> jet;
};

inline ScalarField field_from_expr(ExprPtr e) {
    return {
        [e](std::span<const double> x) { return eval_value(*e, x); },
        [e](std::span<const double> x) { return eval_jet2(*e, x); },
    };
}

inline ScalarField field_const(double c) {
    return {
        [c](std::span<const double>) { return c; },
        [c](std::span<const double> x) { return jet2_const(c, x.size()); },
    };
}

// Wraps a generic callable f(span<const T>) -> T that is valid for both
// T = double and T = Jet2.
template <class F>
ScalarField field_from_callable(F f) {
    return {
        [f](std::span<const double> x) -> double { return f(x); },
        [f](std::span<const double> x) -> Jet2 {
            std::vector<Jet2> vars;
            vars.reserve(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                vars.push_back(jet2_var(x[i], x.size(), i));
            return f(std::span<const Jet2>(vars));
        },
    };
}

// Riemannian base manifold in a single chart, plus the symmetric tensor
// `a` that deforms the complete-lift metric, and catalogs of named vector
// fields, 1-forms and (1,1) tensors used by the verification suite.
//
// Component layout: metric and a are n*n row-major and kept symmetric by
// construction (both (j,i) and (i,j) hold the same field).  endos store
// C^k_i row-major with the contravariant slot first.
struct ManifoldModel {
    std::string name;
    std::size_t n = 0;
    std::vector<std::pair<double, double>> box;  // sample range per coordinate
    std::vector<ScalarField> metric;             // g_{ji}, n*n
    std::vector<ScalarField> a;                  // a_{ji}, n*n
    std::map<std::string, std::vector<ScalarField>> fields;  // X^h, n components
    std::map<std::string, std::vector<ScalarField>> forms;   // w_i, n components
    std::map<std::string, std::vector<ScalarField>> endos;   // C^k_i, n*n

    // Optional closed-form Christoffel symbols, used by tests as an
    // independent oracle; [k][j][i] row-major n^3 when present.
    std::function<std::vector<double>(std::span<const double>)> reference_christoffel;

    const ScalarField& g_at(std::size_t j, std::size_t i) const {
        return metric[j * n + i];
    }
    const ScalarField& a_at(std::size_t j, std::size_t i) const { return a[j * n + i]; }

    const std::vector<ScalarField>& field(const std::string& nm) const {
        auto it = fields.find(nm);
        if (it == fields.end()) throw UnknownFieldError("unknown vector field '" + nm + "'");
        return it->second;
    }

    const std::vector<ScalarField>& form(const std::string& nm) const {
        auto it = forms.find(nm);
        if (it == forms.end()) throw UnknownFieldError("unknown 1-form '" + nm + "'");
        return it->second;
    }

    const std::vector<ScalarField>& endo(const std::string& nm) const {
        auto it = endos.find(nm);
        if (it == endos.end()) throw UnknownFieldError("unknown (1,1) field '" + nm + "'");
        return it->second;
    }

    ManifoldModel with_a(std::vector<ScalarField> new_a, std::string suffix) const {
        ManifoldModel m = *this;
        if (new_a.size() != n * n) throw ShapeError("a must have n*n components");
        m.a = std::move(new_a);
        m.name = name + suffix;
        return m;
    }
};

// Symmetric n*n component list from the upper triangle: entry (j,i) with
// j <= i is shared with (i,j).
inline std::vector<ScalarField> symmetric_components(
    std::size_t n, const std::map<std::pair<std::size_t, std::size_t>, ScalarField>& upper) {
    std::vector<ScalarField> out(n * n, field_const(0.0));
    for (const auto& [ji, f] : upper) {
        out[ji.first * n + ji.second] = f;
        out[ji.second * n + ji.first] = f;
    }
    return out;
}

inline std::vector<ScalarField> zero_components(std::size_t count) {
    return std::vector<ScalarField>(count, field_const(0.0));
}

// ---- model document parsing ----
//
// Plain-text key/value format, one declaration per line:
//
//   name = sphere
//   dim = 2
//   box x1 = 0.3 .. 2.8
//   g 1 1 = 1
//   g 2 2 = sin(x1)^2        # comments run to end of line
//   a 1 1 = 0
//   field rot 1 = 0
//   field rot 2 = 1
//   oneform w 1 = x2
//   tensor11 C 1 1 = 1
//
// g and a take the upper triangle only (first index <= second); omitted
// entries default to zero.  tensor11 indices are C^k_i with k first.

namespace detail {

struct DocLine {
    std::size_t offset;  // byte offset of line start in the document
    std::string text;    // content with comment stripped
};

inline std::vector<DocLine> split_lines(std::string_view doc) {
    std::vector<DocLine> lines;
    std::size_t start = 0;
    while (start <= doc.size()) {
        std::size_t end = doc.find('\n', start);
        if (end == std::string_view::npos) end = doc.size();
        std::string_view raw = doc.substr(start, end - start);
        std::size_t hash = raw.find('#');
        if (hash != std::string_view::npos) raw = raw.substr(0, hash);
        lines.push_back({start, std::string(raw)});
        if (end == doc.size()) break;
        start = end + 1;
    }
    return lines;
}

inline std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) words.push_back(s.substr(start, i - start));
    }
    return words;
}

inline std::size_t parse_index(const std::string& w, std::size_t dim, std::size_t at) {
    std::size_t v = 0;
    if (w.empty()) throw ParseError("missing index", at);
    for (char c : w) {
        if (c < '0' || c > '9') throw ParseError("malformed index '" + w + "'", at);
        v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    if (v < 1 || v > dim)
        throw ParseError("index " + w + " out of range 1.." + std::to_string(dim), at);
    return v - 1;
}

inline double parse_double(const std::string& w, std::size_t at) {
    double v = 0.0;
    auto res = std::from_chars(w.data(), w.data() + w.size(), v);
    if (res.ec != std::errc() || res.ptr != w.data() + w.size())
        throw ParseError("malformed number '" + w + "'", at);
    return v;
}

}  // namespace detail

inline ManifoldModel parse_model(std::string_view doc) {
    using detail::parse_index;
    using detail::split_words;

    ManifoldModel m;
    bool have_name = false, have_dim = false;
    std::map<std::pair<std::size_t, std::size_t>, ExprPtr> g_exprs, a_exprs;
    std::map<std::string, std::map<std::size_t, ExprPtr>> field_exprs, form_exprs;
    std::map<std::string, std::map<std::pair<std::size_t, std::size_t>, ExprPtr>> endo_exprs;
    std::vector<bool> have_box;

    // First pass to find dim so indices can be validated as we go.
    auto lines = detail::split_lines(doc);
    for (const auto& line : lines) {
        auto words = split_words(line.text);
        if (words.size() >= 3 && words[0] == "dim" && words[1] == "=") {
            if (have_dim) throw ParseError("duplicate dim", line.offset);
            m.n = parse_index(words[2], 1000, line.offset) + 1;
            have_dim = true;
        }
    }
    if (!have_dim) throw ParseError("missing dim declaration", doc.size());
    have_box.assign(m.n, false);
    m.box.assign(m.n, {0.0, 0.0});

    for (const auto& line : lines) {
        auto words = split_words(line.text);
        if (words.empty()) continue;
        const std::size_t at = line.offset;
        const std::string& key = words[0];

        auto eq_pos = line.text.find('=');
        auto rhs_text = [&]() -> std::string {
            if (eq_pos == std::string::npos)
                throw ParseError("missing '=' in declaration", at);
            return line.text.substr(eq_pos + 1);
        };
        auto rhs_expr = [&](std::size_t expected_words) -> ExprPtr {
            if (words.size() < expected_words + 2 || words[expected_words] != "=")
                throw ParseError("malformed declaration", at);
            ExprPtr e;
            try {
                e = parse_expr(rhs_text());
            } catch (const ParseError& pe) {
                throw ParseError(pe.what(), at + eq_pos + 1 + pe.offset);
            }
            if (max_var_index(*e) > m.n)
                throw ParseError("expression references x" +
                                     std::to_string(max_var_index(*e)) +
                                     " beyond dim " + std::to_string(m.n),
                                 at);
            return e;
        };

        if (key == "dim") continue;  // handled in the first pass

        if (key == "name") {
            if (words.size() != 3 || words[1] != "=")
                throw ParseError("malformed name declaration", at);
            if (have_name) throw ParseError("duplicate name", at);
            m.name = words[2];
            have_name = true;
        } else if (key == "box") {
            if (words.size() != 6 || words[2] != "=" || words[4] != "..")
                throw ParseError("box needs the form: box xK = LO .. HI", at);
            if (words[1].size() < 2 || words[1][0] != 'x')
                throw ParseError("box coordinate must be x1..xn", at);
            std::size_t k = parse_index(words[1].substr(1), m.n, at);
            if (have_box[k]) throw ParseError("duplicate box for " + words[1], at);
            double lo = detail::parse_double(words[3], at);
            double hi = detail::parse_double(words[5], at);
            if (!(lo < hi)) throw ParseError("box bounds must satisfy LO < HI", at);
            m.box[k] = {lo, hi};
            have_box[k] = true;
        } else if (key == "g" || key == "a") {
            if (words.size() < 4) throw ParseError("malformed declaration", at);
            std::size_t j = parse_index(words[1], m.n, at);
            std::size_t i = parse_index(words[2], m.n, at);
            if (j > i)
                throw ParseError("specify the upper triangle: use " + key + " " +
                                     std::to_string(i + 1) + " " + std::to_string(j + 1),
                                 at);
            auto& dst = (key == "g") ? g_exprs : a_exprs;
            if (dst.count({j, i}))
                throw ParseError("duplicate " + key + " entry", at);
            dst[{j, i}] = rhs_expr(3);
        } else if (key == "field" || key == "oneform") {
            if (words.size() < 5) throw ParseError("malformed declaration", at);
            std::size_t k = parse_index(words[2], m.n, at);
            auto& dst = (key == "field") ? field_exprs : form_exprs;
            if (dst[words[1]].count(k))
                throw ParseError("duplicate component for " + key + " " + words[1], at);
            dst[words[1]][k] = rhs_expr(3);
        } else if (key == "tensor11") {
            if (words.size() < 6) throw ParseError("malformed declaration", at);
            std::size_t k = parse_index(words[2], m.n, at);
            std::size_t i = parse_index(words[3], m.n, at);
            if (endo_exprs[words[1]].count({k, i}))
                throw ParseError("duplicate component for tensor11 " + words[1], at);
            endo_exprs[words[1]][{k, i}] = rhs_expr(4);
        } else {
            throw ParseError("unknown key '" + key + "'", at);
        }
    }

    if (!have_name) throw ParseError("missing name declaration", doc.size());
    for (std::size_t k = 0; k < m.n; ++k)
        if (!have_box[k])
            throw ParseError("missing box for x" + std::to_string(k + 1), doc.size());

    std::map<std::pair<std::size_t, std::size_t>, ScalarField> g_fields, a_fields;
    for (const auto& [ji, e] : g_exprs) g_fields[ji] = field_from_expr(e);
    for (const auto& [ji, e] : a_exprs) a_fields[ji] = field_from_expr(e);
    m.metric = symmetric_components(m.n, g_fields);
    m.a = symmetric_components(m.n, a_fields);

    for (const auto& [nm, comps] : field_exprs) {
        auto& dst = m.fields[nm];
        dst = zero_components(m.n);
        for (const auto& [k, e] : comps) dst[k] = field_from_expr(e);
    }
    for (const auto& [nm, comps] : form_exprs) {
        auto& dst = m.forms[nm];
        dst = zero_components(m.n);
        for (const auto& [k, e] : comps) dst[k] = field_from_expr(e);
    }
    for (const auto& [nm, comps] : endo_exprs) {
        auto& dst = m.endos[nm];
        dst = zero_components(m.n * m.n);
        for (const auto& [ki, e] : comps) dst[ki.first * m.n + ki.second] = field_from_expr(e);
    }
    return m;
}

}  // namespace synectic
