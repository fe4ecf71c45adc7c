#include "hampath/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hampath/errors.hpp"
#include "hampath/propagators.hpp"
#include "hampath/verify.hpp"

namespace hampath::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Decimal inputs such as 1.5707963 land a few 1e-8 away from a caustic; the
// tool treats anything within this distance in sqrt(k) t as singular.
constexpr double kInputCausticDistance = 1e-7;

bool near_caustic(double k, double t) {
    if (is_singular_time(k, t)) return true;
    const double wt = std::sqrt(k) * t;
    const double half_pi = std::numbers::pi / 2.0;
    const double m = std::round((wt - half_pi) / std::numbers::pi);
    return m >= 0.0 && std::abs(wt - (half_pi + m * std::numbers::pi)) <= kInputCausticDistance;
}

void require_clear_of_caustic(double k, double t) {
    require_regular_time(k, t);
    if (near_caustic(k, t)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "singular time: sqrt(k) t = " << std::sqrt(k) * t
            << " is within 1e-7 of a zero of cos(sqrt(k) t) at k = " << k << ", t = " << t;
        throw SingularTime(msg.str());
    }
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_number(const std::string& name, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw UsageError("--" + name + " expects a finite number, got '" + text + "'");
    }
    return v;
}

struct Range {
    std::string name;
    std::vector<double> values;
};

std::optional<Range> parse_range(const std::string& name, const std::string& text) {
    if (text.find(':') == std::string::npos) return std::nullopt;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw UsageError("--" + name + " range must be lo:hi:count");
    const double lo = parse_number(name, parts[0]);
    const double hi = parse_number(name, parts[1]);
    int count = 0;
    const auto res =
        std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), count);
    if (res.ec != std::errc() || res.ptr != parts[2].data() + parts[2].size() || count < 1) {
        throw UsageError("--" + name + " range count must be a positive integer");
    }
    Range r{name, {}};
    for (int i = 0; i < count; ++i) {
        r.values.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
    return r;
}

struct Config {
    std::map<std::string, std::string> raw;  // numeric flags as given
    std::string f_spec;
    std::string format = "json";
    std::string out_path;
    std::string suite;
    std::string system;

    bool has(const std::string& name) const { return raw.count(name) > 0; }

    double num(const std::string& name, double fallback) const {
        const auto it = raw.find(name);
        if (it == raw.end()) return fallback;
        if (it->second.find(':') != std::string::npos) {
            throw UsageError("--" + name + " takes a range only with the sweep command");
        }
        return parse_number(name, it->second);
    }

    int integer(const std::string& name, int fallback) const {
        const double v = num(name, fallback);
        if (v != std::floor(v) || v < 1.0 || v > 1e9) {
            throw UsageError("--" + name + " expects a positive integer");
        }
        return static_cast<int>(v);
    }
};

struct NumericFlag {
    const char* name;
    const char* help;
};

const NumericFlag kNumericFlags[] = {
    {"k", "oscillator stiffness, V = k x^2 / 2"},
    {"t", "final time"},
    {"p", "final momentum"},
    {"p0", "initial momentum (free particle)"},
    {"eps", "free-particle regularization"},
    {"grid-n", "time grid cells"},
    {"terms", "spectral series terms"},
    {"dim", "oracle basis dimension"},
    {"h", "finite-difference step"},
};

void add_common(CLI::App* cmd, Config& cfg, std::map<std::string, std::string>& store) {
    for (const auto& flag : kNumericFlags) {
        cmd->add_option(std::string("--") + flag.name, store[flag.name], flag.help);
    }
    cmd->add_option("--f-spec", cfg.f_spec, "test function JSON file");
    cmd->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", cfg.out_path, "write results here instead of stdout");
}

ordered_json complex_json(cplx z) { return ordered_json{{"re", z.real()}, {"im", z.imag()}}; }

ordered_json value_json(cplx z) {
    return ordered_json{{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)},
                        {"arg", std::arg(z)}};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read f-spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw UsageError("cannot read f-spec file '" + path + "'");
    return buf.str();
}

PhaseFunction load_test_function(const Config& cfg, const TimeGrid& grid) {
    if (cfg.f_spec.empty()) return PhaseFunction(grid);
    const std::string text = read_file(cfg.f_spec);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("f-spec '" + cfg.f_spec + "' is not valid JSON: " + e.what());
    }
    if (doc.is_object() && (doc.contains("x") || doc.contains("p")) && !doc.contains("terms")) {
        auto slot = [&](const char* key) {
            return doc.contains(key)
                       ? sample_test_function(grid, parse_test_function_spec(doc[key].dump()))
                       : DiscreteFunction(grid);
        };
        return PhaseFunction(slot("x"), slot("p"));
    }
    return PhaseFunction::momentum(sample_test_function(grid, parse_test_function_spec(text)));
}

bool is_free_system(const Config& cfg) {
    if (cfg.system == "free") return true;
    if (cfg.system == "ho") return false;
    if (!cfg.system.empty()) throw UsageError("system must be 'free' or 'ho'");
    return cfg.has("eps") || cfg.has("p0");
}

void emit_value(std::ostream& os, const Config& cfg, const ordered_json& doc) {
    if (cfg.format == "json") {
        os << doc.dump() << '\n';
        return;
    }
    std::string header, row;
    for (const auto& [key, v] : doc.items()) {
        auto add = [&](const std::string& name, double x) {
            header += (header.empty() ? "" : ",") + name;
            row += (row.empty() ? "" : ",") + format_number(x);
        };
        if (v.is_object()) {
            for (const auto& [sub, x] : v.items()) add(key + "_" + sub, x.get<double>());
        } else if (v.is_boolean()) {
            add(key, v.get<bool>() ? 1.0 : 0.0);
        } else {
            add(key, v.get<double>());
        }
    }
    os << header << '\n' << row << '\n';
}

// ---------------------------------------------------------------------------

int cmd_propagator_free(const Config& cfg, std::ostream& os) {
    const double p0 = cfg.num("p0", 0.0);
    const FreeParams params{p0, cfg.num("p", p0), cfg.num("t", 1.0), cfg.num("eps", 0.01)};
    params.validate();
    const cplx value = free_expectation_eps(params, cfg.integer("grid-n", 256));
    ordered_json doc = value_json(value);
    doc["reference"] = complex_json(free_expectation_reference(params));
    emit_value(os, cfg, doc);
    return kOk;
}

int cmd_propagator_ho(const Config& cfg, std::ostream& os, std::ostream& err) {
    const HOParams params{cfg.num("k", 1.0), cfg.num("t", 1.0), cfg.num("p", 0.0)};
    if (!(params.k > 0.0) || !(params.t > 0.0)) params.validate();
    require_clear_of_caustic(params.k, params.t);
    if (params.beyond_first_caustic()) {
        err << "warning: sqrt(k) t > pi/2, past the first caustic; principal branch used\n";
    }
    emit_value(os, cfg, value_json(ho_propagator(params)));
    return kOk;
}

int cmd_ttransform(const Config& cfg, std::ostream& os) {
    const int grid_n = cfg.integer("grid-n", 256);
    TTransformValue v;
    if (is_free_system(cfg)) {
        const double p0 = cfg.num("p0", 0.0);
        const FreeParams params{p0, cfg.num("p", p0), cfg.num("t", 1.0), cfg.num("eps", 0.01)};
        params.validate();
        const TimeGrid grid = build_grid(params.t, grid_n);
        v = free_t_transform_eps(params, load_test_function(cfg, grid));
    } else {
        const HOParams params{cfg.num("k", 1.0), cfg.num("t", 1.0), cfg.num("p", 0.0)};
        if (!(params.k > 0.0) || !(params.t > 0.0)) params.validate();
        require_clear_of_caustic(params.k, params.t);
        const TimeGrid grid = build_grid(params.t, grid_n);
        v = ho_t_transform(params, load_test_function(cfg, grid));
    }
    ordered_json doc = value_json(v.value);
    doc["det_factor"] = complex_json(v.det_factor);
    doc["quad_factor"] = complex_json(v.quad_factor);
    doc["pin_factor"] = complex_json(v.pin_factor);
    emit_value(os, cfg, doc);
    return kOk;
}

int cmd_verify(const Config& cfg, std::ostream& os) {
    verify::Report r;
    if (cfg.suite == "det") {
        r = verify::determinant(cfg.num("k", 1.0), cfg.num("t", 1.0), cfg.integer("terms", 100000),
                                cfg.integer("grid-n", 500));
    } else if (cfg.suite == "spectrum") {
        r = verify::spectrum(cfg.num("t", 1.0), cfg.integer("grid-n", 2000));
    } else if (cfg.suite == "pde") {
        r = verify::pde(cfg.num("k", 1.0), cfg.num("h", 1e-3));
    } else if (cfg.suite == "oracle") {
        r = verify::oracle_agreement(cfg.num("k", 1.0), cfg.num("t", 1.0), cfg.num("p", 0.0),
                                     cfg.integer("dim", 200), cfg.num("eps", 0.01),
                                     cfg.num("p0", 0.0), cfg.integer("grid-n", 256));
    } else {
        r = verify::free_limit(cfg.num("p0", 0.0), cfg.num("t", 1.0), cfg.integer("grid-n", 32));
    }
    if (cfg.format == "json") {
        ordered_json results = ordered_json::object();
        for (const auto& [name, value] : r.lines) results[name] = value;
        os << ordered_json{{"suite", r.suite}, {"pass", r.pass}, {"results", results}}.dump()
           << '\n';
    } else {
        os << "quantity,value\n";
        for (const auto& [name, value] : r.lines) os << name << ',' << format_number(value) << '\n';
        os << "pass," << (r.pass ? 1 : 0) << '\n';
    }
    return r.pass ? kOk : kCheckFailed;
}

struct SweepRow {
    std::vector<double> params;
    cplx value{NAN, NAN};
    std::string flag = "ok";
    bool valid = false;
};

int cmd_sweep(const Config& cfg, std::ostream& os) {
    const bool free = is_free_system(cfg);
    const std::vector<std::string> names =
        free ? std::vector<std::string>{"t", "p", "p0", "eps"}
             : std::vector<std::string>{"k", "t", "p"};
    for (const auto& [name, text] : cfg.raw) {
        if (text.find(':') != std::string::npos &&
            std::find(names.begin(), names.end(), name) == names.end()) {
            throw UsageError("--" + name + " cannot be swept for this system");
        }
    }
    std::vector<Range> swept;
    for (const auto& name : names) {
        const auto it = cfg.raw.find(name);
        if (it == cfg.raw.end()) continue;
        if (auto r = parse_range(name, it->second)) swept.push_back(*r);
    }
    if (swept.empty()) throw UsageError("sweep needs at least one lo:hi:count range");
    if (swept.size() > 2) throw UsageError("sweep accepts at most 2 swept parameters");
    auto fixed_value = [&](const std::string& name, double fallback) {
        const auto it = cfg.raw.find(name);
        return it == cfg.raw.end() ? fallback : parse_number(name, it->second);
    };
    const int grid_n = cfg.integer("grid-n", 256);

    const std::size_t outer = swept.front().values.size();
    const std::size_t inner = swept.size() == 2 ? swept[1].values.size() : 1;
    std::vector<SweepRow> rows;
    rows.reserve(outer * inner);
    for (std::size_t a = 0; a < outer; ++a) {
        for (std::size_t b = 0; b < inner; ++b) {
            SweepRow row;
            std::map<std::string, double> at;
            at[swept[0].name] = swept[0].values[a];
            row.params.push_back(swept[0].values[a]);
            if (swept.size() == 2) {
                at[swept[1].name] = swept[1].values[b];
                row.params.push_back(swept[1].values[b]);
            }
            auto value_of = [&](const std::string& name, double fallback) {
                const auto it = at.find(name);
                return it != at.end() ? it->second : fixed_value(name, fallback);
            };
            try {
                if (free) {
                    const double p0 = value_of("p0", 0.0);
                    const FreeParams params{p0, value_of("p", p0), value_of("t", 1.0),
                                            value_of("eps", 0.01)};
                    params.validate();
                    row.value = free_expectation_eps(params, grid_n);
                } else {
                    const HOParams params{value_of("k", 1.0), value_of("t", 1.0),
                                          value_of("p", 0.0)};
                    if (!(params.k > 0.0) || !(params.t > 0.0)) params.validate();
                    require_clear_of_caustic(params.k, params.t);
                    row.value = ho_propagator(params);
                    if (params.beyond_first_caustic()) row.flag = "beyond-caustic";
                }
                row.valid = true;
            } catch (const SingularTime&) {
                row.flag = "singular";
            } catch (const Error& e) {
                if (!e.is_domain_error()) throw;
                row.flag = "domain-error";
            }
            rows.push_back(std::move(row));
        }
    }

    // adjacent valid points along each sweep line must not jump in phase
    const std::size_t line = swept.size() == 2 ? inner : outer;
    for (std::size_t cur = 1; cur < rows.size(); ++cur) {
        const std::size_t prev = cur - 1;
        if (cur % line == 0 || !rows[cur].valid || !rows[prev].valid) continue;
        const double step = std::remainder(std::arg(rows[cur].value) - std::arg(rows[prev].value),
                                           2.0 * std::numbers::pi);
        if (std::abs(step) > 0.5 * std::numbers::pi) {
            rows[cur].flag = rows[cur].flag == "ok" ? "branch-jump" : rows[cur].flag + "|branch-jump";
        }
    }

    if (cfg.format == "csv") {
        for (const auto& r : swept) os << r.name << ',';
        os << "re,im,abs,arg,flag\n";
        for (const auto& row : rows) {
            for (double v : row.params) os << format_number(v) << ',';
            const double re = row.valid ? row.value.real() : NAN;
            const double im = row.valid ? row.value.imag() : NAN;
            const double ab = row.valid ? std::abs(row.value) : NAN;
            const double ar = row.valid ? std::arg(row.value) : NAN;
            os << format_number(re) << ',' << format_number(im) << ',' << format_number(ab) << ','
               << format_number(ar) << ',' << row.flag << '\n';
        }
    } else {
        ordered_json columns = ordered_json::array();
        for (const auto& r : swept) columns.push_back(r.name);
        ordered_json list = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json item = ordered_json::object();
            for (std::size_t i = 0; i < swept.size(); ++i) item[swept[i].name] = row.params[i];
            if (row.valid) {
                item.update(value_json(row.value));
            } else {
                item["re"] = nullptr;
                item["im"] = nullptr;
                item["abs"] = nullptr;
                item["arg"] = nullptr;
            }
            item["flag"] = row.flag;
            list.push_back(item);
        }
        os << ordered_json{{"swept", columns}, {"rows", list}}.dump() << '\n';
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phase-space path integrals: propagators, T-transforms and checks", "hampath"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1, 1);

    Config cfg;
    std::map<std::string, std::map<std::string, std::string>> stores;

    auto* free_cmd = app.add_subcommand("propagator-free", "regularized free-particle expectation");
    auto* ho_cmd = app.add_subcommand("propagator-ho", "closed-form oscillator propagator");
    auto* tt_cmd = app.add_subcommand("ttransform", "T-transform at a test function");
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    auto* sweep_cmd = app.add_subcommand("sweep", "tabulate over lo:hi:count ranges");
    for (CLI::App* cmd : {free_cmd, ho_cmd, tt_cmd, verify_cmd, sweep_cmd}) {
        add_common(cmd, cfg, stores[cmd->get_name()]);
    }
    tt_cmd->add_option("system", cfg.system, "free or ho (inferred from --eps/--p0 otherwise)");
    sweep_cmd->add_option("system", cfg.system, "free or ho (inferred from --eps/--p0 otherwise)");
    verify_cmd->add_option("--suite", cfg.suite, "suite to run")
        ->required()
        ->check(CLI::IsMember({"det", "pde", "oracle", "free-limit", "spectrum"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    for (const auto& [name, value] : stores[chosen->get_name()]) {
        if (chosen->count("--" + name) > 0) cfg.raw[name] = value;
    }

    std::ostringstream buffer;
    int code = kOk;
    try {
        if (chosen == free_cmd) {
            code = cmd_propagator_free(cfg, buffer);
        } else if (chosen == ho_cmd) {
            code = cmd_propagator_ho(cfg, buffer, err);
        } else if (chosen == tt_cmd) {
            code = cmd_ttransform(cfg, buffer);
        } else if (chosen == verify_cmd) {
            code = cmd_verify(cfg, buffer);
        } else {
            code = cmd_sweep(cfg, buffer);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << (e.is_domain_error() ? "domain error: " : "usage error: ") << e.what() << '\n';
        return e.is_domain_error() ? kDomain : kUsage;
    }

    if (cfg.out_path.empty()) {
        out << buffer.str();
    } else {
        std::ofstream file(cfg.out_path, std::ios::binary);
        if (!file || !(file << buffer.str())) {
            err << "usage error: cannot write output file '" << cfg.out_path << "'\n";
            return kUsage;
        }
    }
    return code;
}

}  // namespace hampath::cli
