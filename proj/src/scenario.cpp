#include "secbeam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace secbeam {

const char* to_string(SolverError::Kind kind) {
    switch (kind) {
        case SolverError::Kind::Infeasible: return "infeasible";
        case SolverError::Kind::MaxIterations: return "max-iterations";
        case SolverError::Kind::NumericalBreakdown: return "numerical-breakdown";
        case SolverError::Kind::LineSearch: return "line-search";
        case SolverError::Kind::Stall: return "stall";
    }
    return "unknown";
}

double SystemConfig::total_power() const {
    double s = 0.0;
    for (double p : per_antenna_power) s += p;
    return s;
}

double SystemConfig::spacing() const {
    return element_spacing > 0.0 ? element_spacing : kSpeedOfLight / (2.0 * carrier_hz);
}

double SystemConfig::effective_vartheta() const { return vartheta ? *vartheta : total_power(); }

Scenario paper_scenario(int n_antennas) {
    Scenario sc;
    SystemConfig& c = sc.cfg;
    c.n_antennas = n_antennas;
    c.n_iods = 2;
    c.n_eves = 2;
    c.carrier_hz = 1e9;
    c.per_antenna_power.assign(n_antennas, dbm_to_watts(10.0) / n_antennas);
    c.noise_iod = dbm_to_watts(-100.0);
    c.noise_eve = dbm_to_watts(-100.0);
    c.sinr_targets.assign(2, db_to_linear(8.0));
    c.secrecy_prob = 0.95;
    sc.geom.iod_polar = {{1000.0, -35.0}, {1000.0, 15.0}};
    return sc;
}

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

std::vector<std::string> validate_config(const SystemConfig& cfg) {
    std::vector<std::string> v;
    const int N = cfg.n_antennas, K = cfg.n_iods;
    if (N < 1) v.push_back("n_antennas must be a positive integer");
    if (K < 1) v.push_back("n_iods must be a positive integer");
    if (K >= N) v.push_back("n_iods must be smaller than n_antennas (K < N)");
    if (cfg.n_eves < 1) v.push_back("n_eves must be a positive integer");
    if (!positive_finite(cfg.carrier_hz)) v.push_back("carrier_hz must be positive");
    if (cfg.element_spacing < 0.0 || !std::isfinite(cfg.element_spacing))
        v.push_back("element_spacing must be positive");
    if (static_cast<int>(cfg.per_antenna_power.size()) != N)
        v.push_back("per_antenna_power must have n_antennas entries");
    if (std::any_of(cfg.per_antenna_power.begin(), cfg.per_antenna_power.end(),
                    [](double p) { return !positive_finite(p); }))
        v.push_back("per_antenna_power entries must be positive");
    if (!positive_finite(cfg.noise_iod)) v.push_back("noise_iod must be positive");
    if (!positive_finite(cfg.noise_eve)) v.push_back("noise_eve must be positive");
    if (static_cast<int>(cfg.sinr_targets.size()) != K)
        v.push_back("sinr_targets must have n_iods entries");
    if (std::any_of(cfg.sinr_targets.begin(), cfg.sinr_targets.end(),
                    [](double g) { return !positive_finite(g); }))
        v.push_back("sinr_targets entries must be positive");
    if (!(cfg.secrecy_prob > 0.0 && cfg.secrecy_prob < 1.0)) v.push_back("secrecy_prob must lie in (0,1)");
    if (cfg.sigma_p && !positive_finite(*cfg.sigma_p)) v.push_back("sigma_p must be positive");
    if (cfg.vartheta && !positive_finite(*cfg.vartheta)) v.push_back("vartheta must be positive");
    if (!positive_finite(cfg.tol_eps1)) v.push_back("eps1 must be positive");
    if (!positive_finite(cfg.tol_eps2)) v.push_back("eps2 must be positive");
    if (!positive_finite(cfg.tol_eps3)) v.push_back("eps3 must be positive");
    if (!positive_finite(cfg.barrier_init)) v.push_back("barrier_init must be positive");
    if (!(cfg.barrier_growth > 1.0 && std::isfinite(cfg.barrier_growth))) v.push_back("barrier_growth must exceed 1");
    if (!(cfg.ls_alpha > 0.0 && cfg.ls_alpha < 0.5)) v.push_back("ls_alpha must lie in (0,0.5)");
    if (!(cfg.ls_beta > 0.0 && cfg.ls_beta < 1.0)) v.push_back("ls_beta must lie in (0,1)");
    if (!positive_finite(cfg.gamma_e_init)) v.push_back("gamma_e_init must be positive");
    return v;
}

std::vector<std::string> validate_geometry(const Geometry& geom, const SystemConfig& cfg) {
    std::vector<std::string> v;
    if (static_cast<int>(geom.iod_polar.size()) != cfg.n_iods)
        v.push_back("iod positions must have n_iods entries");
    if (!geom.eve_polar.empty() && static_cast<int>(geom.eve_polar.size()) != cfg.n_eves)
        v.push_back("eve positions must have n_eves entries when given");
    auto check = [&](const std::vector<PolarPoint>& pts, const char* who) {
        for (const auto& p : pts) {
            if (!positive_finite(p.range_m)) v.push_back(std::string(who) + " range must be positive");
            if (!(std::abs(p.azimuth_deg) <= 90.0)) v.push_back(std::string(who) + " azimuth must lie in [-90,90]");
        }
    };
    check(geom.iod_polar, "iod");
    check(geom.eve_polar, "eve");
    return v;
}

namespace {

struct Entry {
    std::vector<double> values;
    std::string raw;
    int line = 0;
    bool used = false;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Parser {
public:
    Parser(const std::string& text, std::string origin) : origin_(std::move(origin)) {
        std::istringstream in(text);
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(no, "expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty()) fail(no, "missing key");
            if (val.empty()) fail(no, "missing value for '" + key + "'");
            if (entries_.count(key)) fail(no, "duplicate key '" + key + "'");
            Entry e;
            e.raw = val;
            e.line = no;
            entries_[key] = e;
        }
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw InputError(origin_ + ":" + std::to_string(line) + ": " + msg);
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::vector<double> numbers(const std::string& key) {
        Entry& e = entries_.at(key);
        e.used = true;
        std::string s = e.raw;
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream in(s);
        std::vector<double> out;
        std::string tok;
        while (in >> tok) {
            std::size_t pos = 0;
            double x = 0.0;
            try {
                x = std::stod(tok, &pos);
            } catch (const std::exception&) {
                fail(e.line, "'" + key + "': not a number: '" + tok + "'");
            }
            if (pos != tok.size()) fail(e.line, "'" + key + "': not a number: '" + tok + "'");
            out.push_back(x);
        }
        return out;
    }

    double number(const std::string& key) {
        auto v = numbers(key);
        if (v.size() != 1) fail(entries_.at(key).line, "'" + key + "' expects a single value");
        return v[0];
    }

    int integer(const std::string& key) {
        const double x = number(key);
        if (x != std::floor(x) || std::abs(x) > 1e9) fail(entries_.at(key).line, "'" + key + "' expects an integer");
        return static_cast<int>(x);
    }

    bool boolean(const std::string& key) {
        Entry& e = entries_.at(key);
        e.used = true;
        if (e.raw == "true" || e.raw == "1" || e.raw == "yes") return true;
        if (e.raw == "false" || e.raw == "0" || e.raw == "no") return false;
        fail(e.line, "'" + key + "' expects true or false");
    }

    std::vector<double> sized(const std::string& key, int n) {
        auto v = numbers(key);
        if (v.size() == 1 && n > 1) v.assign(n, v[0]);
        if (static_cast<int>(v.size()) != n)
            fail(entries_.at(key).line, "'" + key + "' expects 1 or " + std::to_string(n) + " values");
        return v;
    }

    void check_unused() const {
        for (const auto& [k, e] : entries_)
            if (!e.used) fail(e.line, "unknown key '" + k + "'");
    }

    int line_of(const std::string& key) const { return entries_.at(key).line; }

private:
    std::string origin_;
    std::map<std::string, Entry> entries_;
};

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    Parser p(text, origin);
    Scenario sc;
    SystemConfig& c = sc.cfg;

    auto opt_num = [&](const char* key, double& dst) {
        if (p.has(key)) dst = p.number(key);
    };
    for (const char* key : {"n_antennas", "n_iods"})
        if (!p.has(key)) throw InputError(origin + ": missing required key '" + std::string(key) + "'");

    c.n_antennas = p.integer("n_antennas");
    c.n_iods = p.integer("n_iods");
    if (p.has("n_eves")) c.n_eves = p.integer("n_eves");
    opt_num("carrier_hz", c.carrier_hz);
    opt_num("element_spacing_m", c.element_spacing);
    const int N = std::max(c.n_antennas, 1);
    const int K = std::max(c.n_iods, 1);

    if (p.has("per_antenna_power_dbm") && p.has("total_power_dbm"))
        p.fail(p.line_of("total_power_dbm"), "give either total_power_dbm or per_antenna_power_dbm");
    if (p.has("per_antenna_power_dbm")) {
        for (double dbm : p.sized("per_antenna_power_dbm", N)) c.per_antenna_power.push_back(dbm_to_watts(dbm));
    } else {
        const double total = p.has("total_power_dbm") ? p.number("total_power_dbm") : 10.0;
        c.per_antenna_power.assign(N, dbm_to_watts(total) / N);
    }
    if (p.has("noise_iod_dbm")) c.noise_iod = dbm_to_watts(p.number("noise_iod_dbm"));
    if (p.has("noise_eve_dbm")) c.noise_eve = dbm_to_watts(p.number("noise_eve_dbm"));
    if (p.has("sinr_target_db")) {
        for (double db : p.sized("sinr_target_db", K)) c.sinr_targets.push_back(db_to_linear(db));
    } else {
        c.sinr_targets.assign(K, db_to_linear(8.0));
    }
    opt_num("secrecy_prob", c.secrecy_prob);
    if (p.has("sigma_p_dbm")) c.sigma_p = dbm_to_watts(p.number("sigma_p_dbm"));
    if (p.has("vartheta")) c.vartheta = p.number("vartheta");
    opt_num("eps1", c.tol_eps1);
    opt_num("eps2", c.tol_eps2);
    opt_num("eps3", c.tol_eps3);
    opt_num("barrier_init", c.barrier_init);
    opt_num("barrier_growth", c.barrier_growth);
    opt_num("ls_alpha", c.ls_alpha);
    opt_num("ls_beta", c.ls_beta);
    if (p.has("sum_power")) c.sum_power = p.boolean("sum_power");
    if (p.has("gamma_e_init_db")) c.gamma_e_init = db_to_linear(p.number("gamma_e_init_db"));
    if (p.has("rng_seed")) {
        const double s = p.number("rng_seed");
        if (s < 0 || s != std::floor(s)) p.fail(p.line_of("rng_seed"), "'rng_seed' expects a non-negative integer");
        c.rng_seed = static_cast<std::uint64_t>(s);
    }

    if (!p.has("iod_azimuth_deg")) throw InputError(origin + ": missing required key 'iod_azimuth_deg'");
    const auto az = p.sized("iod_azimuth_deg", K);
    const auto rg = p.has("iod_range_m") ? p.sized("iod_range_m", K) : std::vector<double>(K, 1000.0);
    for (int k = 0; k < K; ++k) sc.geom.iod_polar.push_back({rg[k], az[k]});
    if (p.has("eve_azimuth_deg")) {
        const int Q = std::max(c.n_eves, 1);
        const auto eaz = p.sized("eve_azimuth_deg", Q);
        const auto erg = p.has("eve_range_m") ? p.sized("eve_range_m", Q) : std::vector<double>(Q, 1000.0);
        for (int q = 0; q < Q; ++q) sc.geom.eve_polar.push_back({erg[q], eaz[q]});
    } else if (p.has("eve_range_m")) {
        p.fail(p.line_of("eve_range_m"), "'eve_range_m' requires 'eve_azimuth_deg'");
    }
    p.check_unused();

    auto errs = validate_config(c);
    auto gerrs = validate_geometry(sc.geom, c);
    errs.insert(errs.end(), gerrs.begin(), gerrs.end());
    if (!errs.empty()) {
        std::string msg = origin + ": invalid scenario:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw InputError(msg);
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

namespace {

std::string join(const std::vector<double>& v, const std::function<double(double)>& f) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << f(v[i]);
    return os.str();
}

}  // namespace

std::string format_scenario(const Scenario& sc) {
    const SystemConfig& c = sc.cfg;
    std::ostringstream os;
    os.precision(17);
    auto id = [](double x) { return x; };
    os << "n_antennas = " << c.n_antennas << "\n";
    os << "n_iods = " << c.n_iods << "\n";
    os << "n_eves = " << c.n_eves << "\n";
    os << "carrier_hz = " << c.carrier_hz << "\n";
    if (c.element_spacing > 0.0) os << "element_spacing_m = " << c.element_spacing << "\n";
    os << "per_antenna_power_dbm = " << join(c.per_antenna_power, watts_to_dbm) << "\n";
    os << "noise_iod_dbm = " << watts_to_dbm(c.noise_iod) << "\n";
    os << "noise_eve_dbm = " << watts_to_dbm(c.noise_eve) << "\n";
    os << "sinr_target_db = " << join(c.sinr_targets, linear_to_db) << "\n";
    os << "secrecy_prob = " << c.secrecy_prob << "\n";
    if (c.sigma_p) os << "sigma_p_dbm = " << watts_to_dbm(*c.sigma_p) << "\n";
    if (c.vartheta) os << "vartheta = " << *c.vartheta << "\n";
    os << "eps1 = " << c.tol_eps1 << "\neps2 = " << c.tol_eps2 << "\neps3 = " << c.tol_eps3 << "\n";
    os << "barrier_init = " << c.barrier_init << "\nbarrier_growth = " << c.barrier_growth << "\n";
    os << "ls_alpha = " << c.ls_alpha << "\nls_beta = " << c.ls_beta << "\n";
    os << "sum_power = " << (c.sum_power ? "true" : "false") << "\n";
    os << "gamma_e_init_db = " << linear_to_db(c.gamma_e_init) << "\n";
    os << "rng_seed = " << c.rng_seed << "\n";
    std::vector<double> r, a;
    for (const auto& p : sc.geom.iod_polar) r.push_back(p.range_m), a.push_back(p.azimuth_deg);
    os << "iod_range_m = " << join(r, id) << "\n";
    os << "iod_azimuth_deg = " << join(a, id) << "\n";
    if (!sc.geom.eve_polar.empty()) {
        r.clear();
        a.clear();
        for (const auto& p : sc.geom.eve_polar) r.push_back(p.range_m), a.push_back(p.azimuth_deg);
        os << "eve_range_m = " << join(r, id) << "\n";
        os << "eve_azimuth_deg = " << join(a, id) << "\n";
    }
    return os.str();
}

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write scenario file '" + path + "'");
    out << format_scenario(sc);
}

}  // namespace secbeam
