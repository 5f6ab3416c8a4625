#include "lognls/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace lognls::cfg {
namespace {

constexpr double kE = 2.71828182845904523536;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct RawValue {
    std::string text;
    int line = 0;
    bool consumed = false;
};

/// Tokenized config plus error sink; value getters record every problem.
struct Reader {
    std::map<std::string, RawValue> kv; // "section.key" -> value
    std::vector<std::string>& errors;

    explicit Reader(std::vector<std::string>& errs) : errors(errs) {}

    void fail(const RawValue& v, const std::string& what) {
        errors.push_back("line " + std::to_string(v.line) + ": " + what);
    }

    bool has(const std::string& name) { return kv.count(name) != 0; }

    const RawValue* take(const std::string& name) {
        auto it = kv.find(name);
        if (it == kv.end()) return nullptr;
        it->second.consumed = true;
        return &it->second;
    }

    bool parse_number(const std::string& text, double& out) {
        const std::string t = trim(text);
        if (t.empty()) return false;
        char* end = nullptr;
        out = std::strtod(t.c_str(), &end);
        return end == t.c_str() + t.size() && std::isfinite(out);
    }

    double number(const std::string& name, double dflt) {
        const RawValue* v = take(name);
        if (!v) return dflt;
        double out;
        if (!parse_number(v->text, out)) {
            fail(*v, name + ": expected a number, got '" + trim(v->text) + "'");
            return dflt;
        }
        return out;
    }

    int integer(const std::string& name, int dflt) {
        const double d = number(name, dflt);
        return static_cast<int>(d);
    }

    bool boolean(const std::string& name, bool dflt) {
        const RawValue* v = take(name);
        if (!v) return dflt;
        const std::string t = trim(v->text);
        if (t == "true") return true;
        if (t == "false") return false;
        fail(*v, name + ": expected true or false, got '" + t + "'");
        return dflt;
    }

    std::string str(const std::string& name, const std::string& dflt) {
        const RawValue* v = take(name);
        return v ? trim(v->text) : dflt;
    }

    bool split_array(const RawValue& v, const std::string& name,
                     std::vector<std::string>& out) {
        const std::string t = trim(v.text);
        if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
            fail(v, name + ": expected a bracketed array");
            return false;
        }
        std::string inner = t.substr(1, t.size() - 2);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(trim(item));
        if (out.size() == 1 && out[0].empty()) out.clear();
        return true;
    }

    std::vector<double> numbers(const std::string& name, std::vector<double> dflt) {
        const RawValue* v = take(name);
        if (!v) return dflt;
        std::vector<std::string> items;
        if (!split_array(*v, name, items)) return dflt;
        std::vector<double> out;
        for (const auto& item : items) {
            double d;
            if (!parse_number(item, d)) {
                fail(*v, name + ": expected a number, got '" + item + "'");
                return dflt;
            }
            out.push_back(d);
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& name, std::vector<std::string> dflt) {
        const RawValue* v = take(name);
        if (!v) return dflt;
        std::vector<std::string> items;
        if (!split_array(*v, name, items)) return dflt;
        return items;
    }

    void report_unconsumed() {
        for (const auto& [name, v] : kv)
            if (!v.consumed)
                errors.push_back("line " + std::to_string(v.line) + ": unknown key " + name);
    }
};

void tokenize(const std::string& text, Reader& r, std::vector<std::string>& errors) {
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.find('=') == std::string::npos) {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": unterminated section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                errors.push_back("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        if (section.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": key " + key +
                             " appears before any [section]");
            continue;
        }
        const std::string name = section + "." + key;
        if (r.kv.count(name)) {
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key " + name);
            continue;
        }
        r.kv[name] = RawValue{value, lineno, false};
    }
}

bool is_pow2(int n) { return n >= 16 && (n & (n - 1)) == 0; }

} // namespace

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::gaussian_ode: return "gaussian_ode";
        case Kind::pde: return "pde";
        case Kind::compare: return "compare";
        case Kind::fp: return "fp";
        case Kind::asymptotics: return "asymptotics";
    }
    return "?";
}

std::optional<Kind> kind_from_name(const std::string& name) {
    for (Kind k : {Kind::gaussian_ode, Kind::pde, Kind::compare, Kind::fp, Kind::asymptotics})
        if (name == kind_name(k)) return k;
    return std::nullopt;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    return kind == o.kind && model.lambda == o.model.lambda && model.mu == o.model.mu &&
           model.sigma == o.model.sigma && model.epsilon == o.model.epsilon &&
           init.b0 == o.init.b0 && init.a0 == o.init.a0 && init.x0 == o.init.x0 &&
           field_file == o.field_file && grid_d == o.grid_d && grid_n == o.grid_n &&
           grid_L == o.grid_L && times == o.times && output == o.output &&
           rel_tol == o.rel_tol && compare_tol == o.compare_tol;
}

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    Reader r(result.errors);
    tokenize(text, r, result.errors);

    ExperimentConfig c;

    // kind
    const std::string kind_text = r.str("experiment.kind", "");
    if (kind_text.empty()) {
        result.errors.push_back("experiment.kind is required");
    } else if (auto k = kind_from_name(kind_text)) {
        c.kind = *k;
    } else {
        result.errors.push_back("experiment.kind must be one of gaussian_ode, pde, compare, "
                                "fp, asymptotics; got '" + kind_text + "'");
    }

    // model
    const bool sigma_present = r.has("model.sigma");
    c.model.lambda = r.number("model.lambda", 1.0);
    c.model.mu = r.number("model.mu", 0.0);
    c.model.sigma = r.number("model.sigma", 1.0);
    c.model.epsilon = r.number("model.epsilon", 1e-12);
    if (!(c.model.lambda != 0.0) || !std::isfinite(c.model.lambda))
        result.errors.push_back("model.lambda must be nonzero and finite");
    if (c.model.mu < 0.0) result.errors.push_back("model.mu must be nonnegative");
    if (!(c.model.sigma > 0.0)) result.errors.push_back("model.sigma must be positive");
    if (!(c.model.epsilon > 0.0) || c.model.epsilon > 1e-2)
        result.errors.push_back("model.epsilon must lie in (0, 1e-2]");
    if (sigma_present && c.model.mu == 0.0)
        result.warnings.push_back("model.sigma is ignored because mu = 0");

    // init
    c.field_file = r.str("init.field", "");
    c.init.b0 = cplx(r.number("init.b0_re", 1.0), r.number("init.b0_im", 0.0));
    std::vector<double> a0_re = r.numbers("init.a0_re", {});
    std::vector<double> a0_im = r.numbers("init.a0_im", {});
    std::vector<double> x0 = r.numbers("init.x0", {});
    if (a0_im.empty()) a0_im.assign(a0_re.size(), 0.0);
    if (x0.empty()) x0.assign(a0_re.size(), 0.0);
    if (a0_im.size() != a0_re.size())
        result.errors.push_back("init.a0_im must match init.a0_re in length");
    else if (x0.size() != a0_re.size())
        result.errors.push_back("init.x0 must match init.a0_re in length");
    else {
        for (std::size_t j = 0; j < a0_re.size(); ++j) {
            c.init.a0.push_back(cplx(a0_re[j], a0_im[j]));
            if (!(a0_re[j] > 0.0))
                result.errors.push_back("init.a0_re[" + std::to_string(j) +
                                        "] must be positive");
        }
        c.init.x0 = x0;
    }
    const bool has_gaussian_init = !c.init.a0.empty();
    if (has_gaussian_init && c.init.b0 == cplx(0.0, 0.0))
        result.errors.push_back("init.b0 must be nonzero");
    if (has_gaussian_init && !c.field_file.empty())
        result.errors.push_back("init: give either Gaussian parameters or a field file, not both");

    // grid
    c.grid_d = r.integer("grid.d", 1);
    c.grid_n = r.integer("grid.n", 0);
    c.grid_L = r.number("grid.L", 0.0);
    const bool has_grid = c.grid_n != 0 || c.grid_L != 0.0 || r.has("grid.d");
    if (has_grid) {
        if (c.grid_d < 1 || c.grid_d > 3)
            result.errors.push_back("grid.d must be 1, 2 or 3");
        if (!is_pow2(c.grid_n))
            result.errors.push_back("grid.n must be a power of two >= 16");
        if (!(c.grid_L > 0.0)) result.errors.push_back("grid.L must be positive");
    }

    // times
    c.times.t_end = r.number("times.t_end", 0.0);
    c.times.dt = r.number("times.dt", 0.0);
    if (!(c.times.t_end > 0.0)) result.errors.push_back("times.t_end must be positive");
    const std::string schedule = r.str("times.schedule", "");
    std::vector<double> snaps = r.numbers("times.snapshots", {});
    const bool count_present = r.has("times.count");
    const bool t_first_present = r.has("times.t_first");
    const int count = r.integer("times.count", 0);
    const double t_first = r.number("times.t_first", 0.0);
    if (!schedule.empty() && !snaps.empty())
        result.errors.push_back("times: give either snapshots or a schedule, not both");
    if (schedule.empty()) {
        if (count_present) result.errors.push_back("times.count requires times.schedule");
        if (t_first_present) result.errors.push_back("times.t_first requires times.schedule");
    } else {
        if (count < 2) {
            result.errors.push_back("times.count must be at least 2 for a schedule");
        } else if (schedule == "linear") {
            for (int i = 0; i < count; ++i)
                snaps.push_back(t_first + (c.times.t_end - t_first) * i / (count - 1));
        } else if (schedule == "log") {
            if (!(t_first > 0.0)) {
                result.errors.push_back("times.t_first must be positive for a log schedule");
            } else {
                const double ratio = std::pow(c.times.t_end / t_first, 1.0 / (count - 1));
                double t = t_first;
                for (int i = 0; i < count; ++i, t *= ratio) snaps.push_back(t);
                snaps.back() = c.times.t_end; // kill accumulated roundoff
            }
        } else {
            result.errors.push_back("times.schedule must be linear or log");
        }
    }
    std::sort(snaps.begin(), snaps.end());
    for (double t : snaps)
        if (t < 0.0 || t > c.times.t_end) {
            result.errors.push_back("times: snapshots must lie within [0, t_end]");
            break;
        }
    c.times.snapshots = std::move(snaps);

    // output
    c.output.dir = r.str("output.dir", "out");
    c.output.formats = r.strings("output.formats", {"csv", "json"});
    c.output.field_snapshots = r.boolean("output.field_snapshots", false);
    for (const auto& f : c.output.formats)
        if (f != "csv" && f != "json" && f != "svg")
            result.errors.push_back("output.formats entries must be csv, json or svg; got '" +
                                    f + "'");

    // tolerances
    c.rel_tol = r.number("tolerances.rel_tol", 1e-10);
    c.compare_tol = r.number("tolerances.compare_tol", 1e-4);
    if (!(c.rel_tol > 0.0) || c.rel_tol > 1e-3)
        result.errors.push_back("tolerances.rel_tol must lie in (0, 1e-3]");
    if (!(c.compare_tol > 0.0))
        result.errors.push_back("tolerances.compare_tol must be positive");

    // kind-specific requirements
    const bool needs_grid = c.kind == Kind::pde || c.kind == Kind::compare || c.kind == Kind::fp;
    const bool needs_init = c.kind != Kind::asymptotics;
    if (result.errors.empty()) {
        if (needs_grid && !has_grid)
            result.errors.push_back("grid section is required for kind " +
                                    std::string(kind_name(c.kind)));
        if (needs_init && !has_gaussian_init && c.field_file.empty())
            result.errors.push_back("init section is required for kind " +
                                    std::string(kind_name(c.kind)));
        if ((c.kind == Kind::pde || c.kind == Kind::compare) && !(c.times.dt > 0.0))
            result.errors.push_back("times.dt must be positive for kind " +
                                    std::string(kind_name(c.kind)));
        if (c.kind == Kind::compare && !c.field_file.empty())
            result.errors.push_back("compare experiments need Gaussian init parameters");
        if (c.kind == Kind::fp && !c.field_file.empty())
            result.errors.push_back("fp experiments need Gaussian init parameters");
        if (has_gaussian_init && has_grid &&
            static_cast<int>(c.init.a0.size()) != c.grid_d)
            result.errors.push_back("init.a0_re length must equal grid.d");
        if (c.kind == Kind::asymptotics) {
            if (!(c.model.lambda > 0.0))
                result.errors.push_back("model.lambda must be positive for asymptotics");
            if (c.times.t_end <= kE)
                result.errors.push_back("times.t_end must exceed e for asymptotics");
        }
        if (c.kind == Kind::fp) {
            for (double t : c.times.snapshots)
                if (!(t > 0.0)) {
                    result.errors.push_back(
                        "times: fp snapshots must have strictly positive times");
                    break;
                }
        }
    }

    r.report_unconsumed();
    if (result.errors.empty()) result.config = std::move(c);
    return result;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    auto arr = [&](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ", ";
            s += fmt17(v[i]);
        }
        return s + "]";
    };

    os << "[experiment]\nkind = " << kind_name(cfg.kind) << "\n\n";
    os << "[model]\n";
    os << "lambda = " << fmt17(cfg.model.lambda) << "\n";
    os << "mu = " << fmt17(cfg.model.mu) << "\n";
    if (cfg.model.mu != 0.0 || cfg.model.sigma != 1.0)
        os << "sigma = " << fmt17(cfg.model.sigma) << "\n";
    os << "epsilon = " << fmt17(cfg.model.epsilon) << "\n\n";

    os << "[init]\n";
    if (!cfg.field_file.empty()) {
        os << "field = " << cfg.field_file << "\n";
    } else {
        os << "b0_re = " << fmt17(cfg.init.b0.real()) << "\n";
        os << "b0_im = " << fmt17(cfg.init.b0.imag()) << "\n";
        std::vector<double> re, im;
        for (cplx a : cfg.init.a0) {
            re.push_back(a.real());
            im.push_back(a.imag());
        }
        os << "a0_re = " << arr(re) << "\n";
        os << "a0_im = " << arr(im) << "\n";
        os << "x0 = " << arr(cfg.init.x0) << "\n";
    }
    os << "\n";

    if (cfg.grid_n != 0) {
        os << "[grid]\n";
        os << "d = " << cfg.grid_d << "\n";
        os << "n = " << cfg.grid_n << "\n";
        os << "L = " << fmt17(cfg.grid_L) << "\n\n";
    }

    os << "[times]\n";
    os << "t_end = " << fmt17(cfg.times.t_end) << "\n";
    if (cfg.times.dt != 0.0) os << "dt = " << fmt17(cfg.times.dt) << "\n";
    os << "snapshots = " << arr(cfg.times.snapshots) << "\n\n";

    os << "[output]\n";
    os << "dir = " << cfg.output.dir << "\n";
    std::string fmts = "[";
    for (std::size_t i = 0; i < cfg.output.formats.size(); ++i) {
        if (i) fmts += ", ";
        fmts += cfg.output.formats[i];
    }
    os << "formats = " << fmts << "]\n";
    os << "field_snapshots = " << (cfg.output.field_snapshots ? "true" : "false") << "\n\n";

    os << "[tolerances]\n";
    os << "rel_tol = " << fmt17(cfg.rel_tol) << "\n";
    os << "compare_tol = " << fmt17(cfg.compare_tol) << "\n";
    return os.str();
}

} // namespace lognls::cfg
