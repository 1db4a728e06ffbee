#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rmf/error.hpp"
#include "rmf/io.hpp"

namespace rmf {

using nlohmann::json;

std::string fmt_machine(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_human(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string table_header(const std::string& title, const std::vector<std::string>& columns,
                         const std::string& units) {
    std::string s = "# " + title + "\n# units: " + units + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "\t" : "") + columns[i];
    return s + "\n";
}

json to_json(const EnergyBreakdown& e) {
    return {{"kinetic", e.kinetic},       {"sigma_term", e.sigma_term},
            {"omega_term", e.omega_term}, {"rho_term", e.rho_term},
            {"coulomb_term", e.coulomb_term}, {"total", e.total},
            {"total_split_route", e.total_split_route}};
}

json to_json(const RegimeReport& r) {
    json conds = json::array();
    const char* names[3] = {"scalar_isovector", "proton", "neutron"};
    for (int i = 0; i < 3; ++i)
        conds.push_back({{"name", names[i]}, {"value", r.lhs[i]}, {"margin", r.margin(i)}, {"ok", r.ok[i]}});
    return {{"threshold", r.threshold},
            {"conditions", conds},
            {"d_p", r.d_p},
            {"d_n", r.d_n},
            {"d_p_below_one", r.d_p_below_one},
            {"d_n_below_one", r.d_n_below_one},
            {"d_p_below_four_fifths", r.d_p_bounded},
            {"d_n_below_four_fifths", r.d_n_bounded},
            {"all_ok", r.all_ok()},
            {"failures", r.failures()}};
}

json to_json(const SubadditivityReport& r) {
    return {{"lambda", r.lambda},     {"I_full_scf_value", r.I_full},
            {"I_lambda_scf_value", r.I_lambda}, {"I_complement_scf_value", r.I_complement},
            {"gap", r.gap},           {"slack", r.slack},
            {"weak_holds", r.weak_holds}, {"strict", r.strict}};
}

json to_json(const OperatorBoundsReport& r) {
    auto sp = [](const SpeciesBounds& b) {
        return json{{"d", b.d}, {"min_eig_potential_bound", b.min_eig_potential},
                    {"min_eig_abs_bound", b.min_eig_abs}, {"h_mu", b.h_mu}};
    };
    return {{"proton", sp(r.proton)},
            {"neutron", sp(r.neutron)},
            {"hardy", {{"max_ratio", r.hardy.max_ratio},
                       {"max_ratio_free_projected", r.hardy.max_ratio_free_projected},
                       {"limit", r.hardy.limit},
                       {"limit_free_projected", r.hardy.limit_free_projected},
                       {"battery_size", r.hardy.battery_size},
                       {"within", r.hardy.within()}}}};
}

int threads_from_environment() {
    const char* v = std::getenv("RMF_THREADS");
    if (!v) return 1;
    int t = std::atoi(v);
    return t >= 1 ? t : 1;
}

void write_bundle(const ResultBundle& b, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cli-io", "cannot create output directory " + dir + ": " + ec.message());
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw Error("cli-io", "cannot write " + name);
        out << text;
    };
    put("manifest.json", b.manifest.dump(2) + "\n");
    put("results.json", b.results.dump(2) + "\n");
    for (const auto& [name, text] : b.tables) put(name, text);
}

} // namespace rmf
