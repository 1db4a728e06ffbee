#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rmf/error.hpp"
#include "rmf/io.hpp"

namespace rmf {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& key, const std::string& what) {
    throw ConfigError("config", key + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) schema(where.empty() ? "<root>" : where, "expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            schema(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

double get_real(const json& obj, const std::string& where, const char* key, double def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number()) schema(where + "." + key, "expected a real number");
    double d = v.get<double>();
    if (!std::isfinite(d)) schema(where + "." + key, "expected a finite real number");
    return d;
}

long long get_int(const json& obj, const std::string& where, const char* key, long long def, bool required = false) {
    if (!obj.contains(key)) {
        if (required) schema(where + "." + key, "required integer is missing");
        return def;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) schema(where + "." + key, "expected an integer");
    return v.get<long long>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_boolean()) schema(where + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::vector<double> get_reals(const json& v, const std::string& key) {
    if (!v.is_array()) schema(key, "expected an array of real numbers");
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) schema(key, "expected an array of real numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

void positive(double v, const std::string& key) {
    if (!(v > 0.0)) schema(key, "must be positive (got " + std::to_string(v) + ")");
}

void nonnegative(double v, const std::string& key) {
    if (!(v >= 0.0)) schema(key, "must be nonnegative (got " + std::to_string(v) + ")");
}

} // namespace

RunConfig parse_config_json(const json& j) {
    only_keys(j, "", {"model", "lattice", "scf", "probes", "retraction", "output_dir", "seed"});
    RunConfig c;
    if (!j.contains("model")) schema("model", "required section is missing");

    const json& m = j.at("model");
    only_keys(m, "model", {"g_sigma", "g_omega", "g_rho", "e_charge", "m_sigma", "m_omega", "m_rho", "m_b", "Z", "N"});
    ModelParams& p = c.model;
    p.g_sigma = get_real(m, "model", "g_sigma", p.g_sigma);
    p.g_omega = get_real(m, "model", "g_omega", p.g_omega);
    p.g_rho = get_real(m, "model", "g_rho", p.g_rho);
    p.e_charge = get_real(m, "model", "e_charge", p.e_charge);
    p.m_sigma = get_real(m, "model", "m_sigma", p.m_sigma);
    p.m_omega = get_real(m, "model", "m_omega", p.m_omega);
    p.m_rho = get_real(m, "model", "m_rho", p.m_rho);
    p.m_b = get_real(m, "model", "m_b", p.m_b);
    long long Z = get_int(m, "model", "Z", 0, true), N = get_int(m, "model", "N", 0, true);
    nonnegative(p.g_sigma, "model.g_sigma");
    nonnegative(p.g_omega, "model.g_omega");
    nonnegative(p.g_rho, "model.g_rho");
    nonnegative(p.e_charge, "model.e_charge");
    positive(p.m_sigma, "model.m_sigma");
    positive(p.m_omega, "model.m_omega");
    positive(p.m_rho, "model.m_rho");
    positive(p.m_b, "model.m_b");
    if (Z < 0 || Z > 100000) schema("model.Z", "must be a nonnegative integer");
    if (N < 0 || N > 100000) schema("model.N", "must be a nonnegative integer");
    p.Z = int(Z);
    p.N = int(N);

    if (j.contains("lattice")) {
        const json& l = j.at("lattice");
        only_keys(l, "lattice", {"box_length", "points_per_dim"});
        c.lattice.box_length = get_real(l, "lattice", "box_length", c.lattice.box_length);
        long long n = get_int(l, "lattice", "points_per_dim", c.lattice.points_per_dim);
        positive(c.lattice.box_length, "lattice.box_length");
        if (n < 2 || n % 2 != 0 || n > 1024) schema("lattice.points_per_dim", "must be an even integer >= 2");
        c.lattice.points_per_dim = int(n);
    }

    if (j.contains("scf")) {
        const json& s = j.at("scf");
        only_keys(s, "scf", {"max_iterations", "mixing", "tol_eigenvalue", "tol_density", "tol_el",
                             "initial_guess", "warn_and_proceed", "zero_tol", "dense_cap"});
        SCFConfig& sc = c.scf;
        long long mi = get_int(s, "scf", "max_iterations", sc.max_iterations);
        if (mi < 1 || mi > 1000000) schema("scf.max_iterations", "must be a positive integer");
        sc.max_iterations = int(mi);
        sc.mixing = get_real(s, "scf", "mixing", sc.mixing);
        if (!(sc.mixing > 0.0 && sc.mixing <= 1.0)) schema("scf.mixing", "must lie in (0, 1]");
        sc.tol_eigenvalue = get_real(s, "scf", "tol_eigenvalue", sc.tol_eigenvalue);
        sc.tol_density = get_real(s, "scf", "tol_density", sc.tol_density);
        sc.tol_el = get_real(s, "scf", "tol_el", sc.tol_el);
        positive(sc.tol_eigenvalue, "scf.tol_eigenvalue");
        positive(sc.tol_density, "scf.tol_density");
        positive(sc.tol_el, "scf.tol_el");
        if (s.contains("initial_guess")) {
            const json& g = s.at("initial_guess");
            if (!g.is_string() || g.get<std::string>() != "free-eigenstates")
                schema("scf.initial_guess", "expected the string \"free-eigenstates\"");
        }
        sc.warn_and_proceed = get_bool(s, "scf", "warn_and_proceed", sc.warn_and_proceed);
        sc.eig.zero_tol = get_real(s, "scf", "zero_tol", sc.eig.zero_tol);
        positive(sc.eig.zero_tol, "scf.zero_tol");
        long long cap = get_int(s, "scf", "dense_cap", (long long)sc.eig.dense_cap);
        if (cap < 1) schema("scf.dense_cap", "must be a positive integer");
        sc.eig.dense_cap = std::size_t(cap);
    }

    if (j.contains("probes")) {
        const json& pr = j.at("probes");
        only_keys(pr, "probes", {"subadditivity", "concentration_radii", "descent_epsilons", "check_bounds"});
        if (pr.contains("subadditivity")) {
            const json& s = pr.at("subadditivity");
            if (!s.is_array()) schema("probes.subadditivity", "expected an array of lambda vectors");
            for (const json& v : s) {
                std::vector<double> lam = get_reals(v, "probes.subadditivity");
                if (int(lam.size()) != p.A()) schema("probes.subadditivity", "each lambda vector needs A = Z + N entries");
                for (double x : lam)
                    if (!(x >= 0.0 && x <= 1.0)) schema("probes.subadditivity", "lambda entries must lie in [0, 1]");
                c.probes.subadditivity.push_back(lam);
            }
        }
        if (pr.contains("concentration_radii")) {
            c.probes.concentration_radii = get_reals(pr.at("concentration_radii"), "probes.concentration_radii");
            for (double r : c.probes.concentration_radii) positive(r, "probes.concentration_radii");
        }
        if (pr.contains("descent_epsilons")) {
            c.probes.descent_epsilons = get_reals(pr.at("descent_epsilons"), "probes.descent_epsilons");
            for (double e : c.probes.descent_epsilons) positive(e, "probes.descent_epsilons");
        }
        c.probes.check_bounds = get_bool(pr, "probes", "check_bounds", c.probes.check_bounds);
    }

    if (j.contains("retraction")) {
        const json& r = j.at("retraction");
        only_keys(r, "retraction", {"defect_threshold"});
        c.defect_threshold = get_real(r, "retraction", "defect_threshold", c.defect_threshold);
        positive(c.defect_threshold, "retraction.defect_threshold");
    }

    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) schema("output_dir", "expected a string");
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            schema("seed", "expected a nonnegative integer");
        c.seed = s.get<std::uint64_t>();
    }
    return c;
}

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    return parse_config_json(j);
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

json to_json(const RunConfig& c) {
    json j;
    const ModelParams& p = c.model;
    j["model"] = {{"g_sigma", p.g_sigma}, {"g_omega", p.g_omega}, {"g_rho", p.g_rho},
                  {"e_charge", p.e_charge}, {"m_sigma", p.m_sigma}, {"m_omega", p.m_omega},
                  {"m_rho", p.m_rho}, {"m_b", p.m_b}, {"Z", p.Z}, {"N", p.N}};
    j["lattice"] = {{"box_length", c.lattice.box_length}, {"points_per_dim", c.lattice.points_per_dim}};
    const SCFConfig& s = c.scf;
    j["scf"] = {{"max_iterations", s.max_iterations}, {"mixing", s.mixing},
                {"tol_eigenvalue", s.tol_eigenvalue}, {"tol_density", s.tol_density},
                {"tol_el", s.tol_el}, {"initial_guess", "free-eigenstates"},
                {"warn_and_proceed", s.warn_and_proceed}, {"zero_tol", s.eig.zero_tol},
                {"dense_cap", s.eig.dense_cap}};
    j["probes"] = {{"subadditivity", c.probes.subadditivity},
                   {"concentration_radii", c.probes.concentration_radii},
                   {"descent_epsilons", c.probes.descent_epsilons},
                   {"check_bounds", c.probes.check_bounds}};
    j["retraction"] = {{"defect_threshold", c.defect_threshold}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

} // namespace rmf
