// Command-line front end: loads a stock or file-based manifold model, runs
// verification checks over seeded sample points, and prints component
// blocks of the bundle tensors at a chosen point.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "synectic/bundle.hpp"
#include "synectic/catalog.hpp"
#include "synectic/checks.hpp"
#include "synectic/report.hpp"

using namespace synectic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;

struct ResolvedModel {
    ManifoldModel model;
    bool is_builtin = false;
};

std::string locate(const std::string& text, std::size_t off) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < off && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// A selector is either a stock model name or a path to a model document.
ResolvedModel resolve_model(const std::string& selector) {
    for (const auto& name : builtin_names())
        if (name == selector) return {builtin_model(name), true};

    std::ifstream in(selector, std::ios::binary);
    if (!in) throw std::runtime_error("model not found: " + selector);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    try {
        return {parse_model(text), false};
    } catch (const ParseError& pe) {
        throw std::runtime_error(selector + ": " + locate(text, pe.offset) +
                                 ": " + pe.what());
    }
}

void write_output(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(payload.c_str(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + out_path);
    out << payload;
}

// Parses "x=a,b;y=c,d" (the x=…/y=… pieces may be separated by ';', ',' or
// whitespace).  The fiber part is optional and defaults to zero.
void parse_at(const std::string& at, std::size_t n, std::vector<double>& x,
              std::vector<double>& y) {
    auto grab = [&](std::size_t start, std::size_t stop) {
        std::vector<double> vals;
        std::string chunk = at.substr(start, stop - start);
        for (char& c : chunk)
            if (c == ';' || c == ' ') c = ',';
        std::stringstream ss(chunk);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) vals.push_back(std::stod(item));
        return vals;
    };
    std::size_t xpos = at.find("x=");
    std::size_t ypos = at.find("y=");
    if (xpos == std::string::npos)
        throw std::runtime_error("--at needs the form x=...[,y=...]");
    x = grab(xpos + 2, ypos == std::string::npos ? at.size()
                                                 : (ypos > xpos ? ypos : at.size()));
    if (ypos != std::string::npos)
        y = grab(ypos + 2, ypos > xpos ? at.size() : xpos);
    else
        y.assign(n, 0.0);
    if (x.size() != n)
        throw std::runtime_error("--at: expected " + std::to_string(n) +
                                 " base coordinates, got " +
                                 std::to_string(x.size()));
    if (y.size() != n)
        throw std::runtime_error("--at: expected " + std::to_string(n) +
                                 " fiber coordinates, got " +
                                 std::to_string(y.size()));
}

int cmd_list() {
    std::printf("stock manifolds:\n");
    for (const auto& name : builtin_names()) {
        ManifoldModel m = builtin_model(name);
        std::printf("  %-10s dim=%zu\n", name.c_str(), m.n);
        std::printf("    fields: ");
        bool first = true;
        for (const auto& kv : m.fields) {
            std::printf("%s%s", first ? "" : ", ", kv.first.c_str());
            first = false;
        }
        std::printf("\n    1-forms: ");
        first = true;
        for (const auto& kv : m.forms) {
            std::printf("%s%s", first ? "" : ", ", kv.first.c_str());
            first = false;
        }
        std::printf("\n    (1,1) tensors: ");
        first = true;
        for (const auto& kv : m.endos) {
            std::printf("%s%s", first ? "" : ", ", kv.first.c_str());
            first = false;
        }
        std::printf("\n");
    }
    std::printf("\nchecks:\n");
    for (const auto& spec : check_catalog()) {
        const char* kind = spec.kind == CheckKind::Field  ? "per field"
                           : spec.kind == CheckKind::Endo ? "per (1,1) tensor"
                                                          : "per manifold";
        std::printf("  %-22s %-17s %s\n", spec.id.c_str(), kind,
                    spec.summary.c_str());
    }
    return kExitOk;
}

int cmd_verify(const std::string& selector, std::vector<std::string> checks,
               std::vector<std::string> fields, bool all, std::size_t samples,
               std::uint64_t seed, double tol, const std::string& format,
               const std::string& out_path) {
    ResolvedModel rm = resolve_model(selector);
    const ManifoldModel& model = rm.model;

    // Reject unknown names before any computation.
    for (const auto& id : checks)
        if (!find_check(id)) throw std::runtime_error("unknown check id: " + id);
    for (const auto& f : fields)
        if (!model.fields.count(f) && !model.endos.count(f))
            throw std::runtime_error("unknown field: " + f);

    std::vector<std::string> selected = checks;
    if (all || selected.empty()) {
        selected.clear();
        for (const auto& spec : check_catalog()) selected.push_back(spec.id);
    }

    CheckContext ctx{model, seed, samples, tol};
    RunReport report;
    report.seed = seed;
    report.samples = samples;
    report.tolerance_default = tol;
    report.manifold = model.name;

    for (const auto& id : selected) {
        const CheckSpec* spec = find_check(id);
        switch (spec->kind) {
            case CheckKind::Field:
                for (const auto& kv : model.fields) {
                    if (!fields.empty() &&
                        std::find(fields.begin(), fields.end(), kv.first) ==
                            fields.end())
                        continue;
                    report.checks.push_back(run_check(ctx, id, kv.first));
                }
                break;
            case CheckKind::Endo:
                for (const auto& kv : model.endos) {
                    if (!fields.empty() &&
                        std::find(fields.begin(), fields.end(), kv.first) ==
                            fields.end())
                        continue;
                    report.checks.push_back(run_check(ctx, id, kv.first));
                }
                break;
            case CheckKind::Manifold:
                report.checks.push_back(run_check(ctx, id));
                break;
        }
    }
    sort_report(report);

    if (format == "json")
        write_output(report_to_json(report).dump(2) + "\n", out_path);
    else
        write_output(report_to_text(report, rm.is_builtin), out_path);

    return evaluate_report(report, rm.is_builtin).exit_code();
}

int cmd_tensor(const std::string& selector, const std::string& what,
               const std::string& at, const std::string& format,
               const std::string& out_path) {
    ResolvedModel rm = resolve_model(selector);
    const ManifoldModel& model = rm.model;
    std::vector<double> x, y;
    parse_at(at, model.n, x, y);

    BaseFrame f = base_frame(model, x);
    MultiIndexArray comp({1}, {Variance::Upper});
    if (what == "metric")
        comp = synectic_metric(f, y).comp;
    else if (what == "inverse")
        comp = synectic_metric(f, y).inv;
    else if (what == "gamma3")
        comp = levi_civita_bundle(f, y).coeff;
    else if (what == "gamma4")
        comp = metric_connection_bundle(f, y).coeff;
    else if (what == "H")
        comp = f.h_tensor;
    else if (what == "riemann")
        comp = f.riemann;
    else
        throw std::runtime_error("unknown tensor selector: " + what);

    std::string payload;
    if (format == "json") {
        nlohmann::ordered_json j;
        j["manifold"] = model.name;
        j["what"] = what;
        j["x"] = x;
        j["y"] = y;
        j["dims"] = comp.dims();
        j["components"] = comp.flat();
        payload = j.dump(2) + "\n";
    } else {
        char buf[160];
        payload = "# " + model.name + "  " + what + "  at x=(";
        for (std::size_t k = 0; k < x.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%s%g", k ? ", " : "", x[k]);
            payload += buf;
        }
        payload += "), y=(";
        for (std::size_t k = 0; k < y.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%s%g", k ? ", " : "", y[k]);
            payload += buf;
        }
        payload += ")\n";
        const auto& dims = comp.dims();
        if (dims.size() == 2) {
            for (std::size_t r = 0; r < dims[0]; ++r) {
                for (std::size_t c = 0; c < dims[1]; ++c) {
                    std::snprintf(buf, sizeof buf, "%14.6g", comp.at({r, c}));
                    payload += buf;
                }
                payload += "\n";
            }
        } else {
            bool any = false;
            std::vector<std::size_t> idx(dims.size(), 0);
            for (std::size_t flat = 0; flat < comp.size(); ++flat) {
                comp.unflatten(flat, idx);
                double v = comp.flat()[flat];
                if (v == 0.0) continue;
                any = true;
                payload += "  [";
                for (std::size_t k = 0; k < idx.size(); ++k) {
                    std::snprintf(buf, sizeof buf, "%s%zu", k ? "," : "",
                                  idx[k]);
                    payload += buf;
                }
                std::snprintf(buf, sizeof buf, "] = %.12g\n", v);
                payload += buf;
            }
            if (!any) payload += "  (all components zero)\n";
        }
    }
    write_output(payload, out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synectic metric verification toolkit"};
    app.require_subcommand(1);

    // verify
    auto* verify = app.add_subcommand(
        "verify", "run verification checks over seeded sample points");
    std::string v_manifold, v_format = "text", v_out;
    std::vector<std::string> v_checks, v_fields;
    bool v_all = false;
    std::size_t v_samples = 100;
    std::uint64_t v_seed = 42;
    double v_tol = 1e-8;
    verify->add_option("--manifold", v_manifold,
                       "stock model name or model file path")
        ->required();
    verify->add_option("--check", v_checks, "check id (repeatable)");
    verify->add_option("--field", v_fields,
                       "vector field or (1,1) tensor name (repeatable)");
    verify->add_flag("--all", v_all, "run the complete check catalog");
    verify->add_option("--samples", v_samples, "sample points per check");
    verify->add_option("--seed", v_seed, "sampling seed");
    verify->add_option("--tol", v_tol, "default residual tolerance");
    verify->add_option("--format", v_format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    verify->add_option("--out", v_out, "write the report to a file");

    // tensor
    auto* tensor = app.add_subcommand(
        "tensor", "print a tensor component block at a point");
    std::string t_manifold, t_what, t_at, t_format = "text", t_out;
    tensor->add_option("--manifold", t_manifold,
                       "stock model name or model file path")
        ->required();
    tensor->add_option("--what", t_what, "which tensor")
        ->required()
        ->check(CLI::IsMember(
            {"metric", "inverse", "gamma3", "gamma4", "H", "riemann"}));
    tensor->add_option("--at", t_at, "evaluation point, e.g. x=0.5,1;y=1,0")
        ->required();
    tensor->add_option("--format", t_format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    tensor->add_option("--out", t_out, "write the block to a file");

    // list
    app.add_subcommand("list", "list stock models, named fields and checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand("list")) return cmd_list();
        if (app.got_subcommand("verify"))
            return cmd_verify(v_manifold, v_checks, v_fields, v_all, v_samples,
                              v_seed, v_tol, v_format, v_out);
        return cmd_tensor(t_manifold, t_what, t_at, t_format, t_out);
    } catch (const UnknownFieldError& e) {
        std::fprintf(stderr, "synectic: %s\n", e.what());
        return kExitConfig;
    } catch (const ShapeError& e) {
        std::fprintf(stderr, "synectic: %s\n", e.what());
        return kExitConfig;
    } catch (const SingularMetricError& e) {
        std::fprintf(stderr, "synectic: %s\n", e.what());
        return kExitConfig;  // the model degenerates over its sample box
    } catch (const std::exception& e) {
        std::fprintf(stderr, "synectic: %s\n", e.what());
        return kExitConfig;
    }
}
