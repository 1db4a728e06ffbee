#include <chrono>
#include <cmath>
#include <ctime>
#include <random>

#include "rmf/error.hpp"
#include "rmf/io.hpp"
#include "rmf/kernels.hpp"
#include "rmf/sampling.hpp"

namespace rmf {

using nlohmann::json;

namespace {

const char* units_energy = "natural units (hbar = c = 1), energies in units of m_b, lengths in 1/m_b";

std::string timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json vec_json(const std::vector<double>& v) { return json(v); }

struct Context {
    const RunConfig& cfg;
    const RunOptions& opt;
    ResultBundle& b;
    SCFConfig scf;

    void fail(const std::string& what, int code = exit_assertion_failed) {
        b.failures.push_back(what);
        if (b.exit_code == exit_ok) b.exit_code = code;
    }
    void check(bool ok, const std::string& what) {
        if (!ok) fail(what);
    }
};

void scf_tables(Context& c, const SCFReport& r) {
    std::string h = table_header("SCF iteration history", {"iteration", "energy", "max_delta_eps", "density_residual", "el_residual"}, units_energy);
    for (const auto& it : r.history)
        h += std::to_string(it.iteration) + "\t" + fmt_machine(it.energy) + "\t" + fmt_machine(it.max_delta_eps) +
             "\t" + fmt_machine(it.density_residual) + "\t" + fmt_machine(it.el_residual) + "\n";
    c.b.tables["scf_history.tsv"] = h;

    std::string lv = table_header("occupied single-particle levels", {"species", "slot", "epsilon"}, units_energy);
    for (std::size_t i = 0; i < r.eps_p.size(); ++i) lv += "proton\t" + std::to_string(i) + "\t" + fmt_machine(r.eps_p[i]) + "\n";
    for (std::size_t i = 0; i < r.eps_n.size(); ++i) lv += "neutron\t" + std::to_string(i) + "\t" + fmt_machine(r.eps_n[i]) + "\n";
    c.b.tables["levels.tsv"] = lv;

    std::string en = table_header("energy breakdown (SCF value)", {"term", "value"}, units_energy);
    const EnergyBreakdown& e = r.energy;
    for (auto [k, v] : std::initializer_list<std::pair<const char*, double>>{
             {"kinetic", e.kinetic}, {"sigma_term", e.sigma_term}, {"omega_term", e.omega_term},
             {"rho_term", e.rho_term}, {"coulomb_term", e.coulomb_term}, {"total", e.total},
             {"total_split_route", e.total_split_route}})
        en += std::string(k) + "\t" + fmt_machine(v) + "\n";
    c.b.tables["energy.tsv"] = en;
}

void spectrum_tables(Context& c, const SCFReport& r) {
    for (auto [name, vals] : {std::pair<const char*, const RVec*>{"proton", &r.spectrum_p}, {"neutron", &r.spectrum_n}}) {
        std::string t = table_header(std::string(name) + " mean-field spectrum", {"index", "eigenvalue"}, units_energy);
        for (Eigen::Index i = 0; i < vals->size(); ++i) t += std::to_string(i) + "\t" + fmt_machine((*vals)[i]) + "\n";
        c.b.tables[std::string("spectrum_") + name + ".tsv"] = t;
    }
}

void fields_table(Context& c, const OrbitalSet& o) {
    const Lattice& lat = *o.lattice;
    HamiltonianPair H = build_hamiltonians(o, c.cfg.model);
    std::string t = table_header("densities and meson fields on lattice sites",
                                 {"site", "x", "y", "z", "rho_s", "rho_0", "rho_00", "rho_c", "sigma", "omega0", "R00", "A0"},
                                 "natural units (hbar = c = 1), m_b = 1; positions in 1/m_b, densities in m_b^3");
    for (std::size_t s = 0; s < lat.sites(); ++s) {
        auto x = lat.coords(s);
        t += std::to_string(s);
        for (int a = 0; a < 3; ++a) t += "\t" + fmt_machine(x[a] * lat.spacing());
        for (const RVec* f : {&H.densities.rho_s, &H.densities.rho_0, &H.densities.rho_00, &H.densities.rho_c,
                              &H.fields.sigma, &H.fields.omega0, &H.fields.R00, &H.fields.A0})
            t += "\t" + fmt_machine((*f)[s]);
        t += "\n";
    }
    c.b.tables["fields.tsv"] = t;
}

SCFReport solve_and_check(Context& c) {
    SCFReport r = scf_solve(c.cfg.model, c.cfg.lattice, c.scf);
    json& out = c.b.results["scf"];
    out = {{"converged", r.converged}, {"iterations", r.iterations}, {"eps_p", vec_json(r.eps_p)},
           {"eps_n", vec_json(r.eps_n)}, {"energy", to_json(r.energy)}, {"el_residual", r.el_residual},
           {"commutator_residual", r.commutator_residual}, {"warnings", r.warnings},
           {"degenerate_fermi_level_p", r.degenerate_p}, {"degenerate_fermi_level_n", r.degenerate_n},
           {"label", "SCF value from the free-eigenstate initial guess"}};
    scf_tables(c, r);
    c.b.summary.push_back("SCF " + std::string(r.converged ? "converged" : "NOT converged") + " after " +
                          std::to_string(r.iterations) + " iterations; E = " + fmt_human(r.energy.total) + " m_b");
    if (!r.converged) {
        c.fail("SCF did not converge within " + std::to_string(c.scf.max_iterations) + " iterations", exit_not_converged);
        return r;
    }
    const Lattice& lat = *r.orbitals.lattice;
    c.check(r.el_residual <= c.scf.tol_el, "EL residual " + fmt_human(r.el_residual) + " above tolerance");
    c.check(r.commutator_residual <= c.scf.tol_el, "commutator residual " + fmt_human(r.commutator_residual) + " above tolerance");
    double feas = 0;
    for (Species s : {Species::proton, Species::neutron})
        if (r.orbitals.of(s).cols() > 0)
            feas = std::max(feas, (gram(lat, r.orbitals.of(s)) - r.orbitals.target(s)).cwiseAbs().maxCoeff());
    c.check(feas <= 1e-10, "Gram feasibility violated by " + fmt_human(feas));
    ProjectorDefect d = projector_defect(r.orbitals, c.cfg.model, c.scf.eig);
    c.check(d.max() <= 1e-9, "negative-projector component " + fmt_human(d.max()) + " above 1e-9");
    const double route = std::abs(r.energy.total - r.energy.total_split_route);
    c.check(route <= 1e-10 * std::max(1.0, std::abs(r.energy.total)), "energy routes disagree by " + fmt_human(route));
    out["post_hoc"] = {{"gram_deviation", feas}, {"projector_defect", d.max()}, {"energy_route_difference", route}};
    c.b.summary.push_back("EL residual " + fmt_human(r.el_residual) + ", commutator residual " +
                          fmt_human(r.commutator_residual) + ", projector defect " + fmt_human(d.max()));
    return r;
}

void subadditivity(Context& c) {
    if (c.cfg.probes.subadditivity.empty()) return;
    const double slack = std::max(1e-7, 10.0 * c.scf.tol_density);
    ConstrainedSolver solver = scf_solver_handle(c.cfg.model, c.cfg.lattice, c.scf);
    json arr = json::array();
    std::string t = table_header("subadditivity probe (SCF values)", {"lambda", "I_full", "I_lambda", "I_complement", "gap", "weak_holds", "strict"}, units_energy);
    for (const auto& lam : c.cfg.probes.subadditivity) {
        SubadditivityReport r = subadditivity_probe(c.cfg.model, lam, solver, slack, c.opt.threads);
        arr.push_back(to_json(r));
        std::string ls;
        for (std::size_t i = 0; i < lam.size(); ++i) ls += (i ? "," : "") + fmt_machine(lam[i]);
        t += ls + "\t" + fmt_machine(r.I_full) + "\t" + fmt_machine(r.I_lambda) + "\t" + fmt_machine(r.I_complement) +
             "\t" + fmt_machine(r.gap) + "\t" + (r.weak_holds ? "1" : "0") + "\t" + (r.strict ? "1" : "0") + "\n";
        c.check(r.weak_holds, "weak subadditivity violated for lambda = (" + ls + "): gap " + fmt_human(r.gap));
        c.b.summary.push_back("subadditivity lambda = (" + ls + "): gap " + fmt_human(r.gap) +
                              (r.strict ? " (strict)" : " (not strict)"));
    }
    c.b.results["subadditivity"] = arr;
    c.b.tables["subadditivity.tsv"] = t;
}

void concentration(Context& c, const OrbitalSet& o) {
    if (c.cfg.probes.concentration_radii.empty()) return;
    json arr = json::array();
    std::string t = table_header("concentration profile", {"radius", "max_mass_fraction", "center_i", "center_j", "center_k"},
                                 "natural units (hbar = c = 1), m_b = 1; radius in 1/m_b, mass fraction dimensionless");
    for (double R : c.cfg.probes.concentration_radii) {
        ConcentrationReport r = concentration_profile(o, R);
        arr.push_back({{"radius", R}, {"value", r.value}, {"center", r.center_coords}});
        t += fmt_machine(R) + "\t" + fmt_machine(r.value) + "\t" + std::to_string(r.center_coords[0]) + "\t" +
             std::to_string(r.center_coords[1]) + "\t" + std::to_string(r.center_coords[2]) + "\n";
    }
    c.b.results["concentration"] = arr;
    c.b.tables["concentration.tsv"] = t;
}

void bounds(Context& c, const OrbitalSet& o, const std::string& label) {
    OperatorBoundsReport r = check_operator_bounds(o, c.cfg.model, c.scf.eig);
    c.b.results["operator_bounds"] = to_json(r);
    c.b.results["operator_bounds"]["orbitals"] = label;
    std::string t = table_header("operator bound checks", {"species", "d", "min_eig_potential_bound", "min_eig_abs_bound", "h_mu"}, units_energy);
    for (auto [name, s] : {std::pair<const char*, const SpeciesBounds*>{"proton", &r.proton}, {"neutron", &r.neutron}}) {
        t += std::string(name) + "\t" + fmt_machine(s->d) + "\t" + fmt_machine(s->min_eig_potential) + "\t" +
             fmt_machine(s->min_eig_abs) + "\t" + fmt_machine(s->h_mu) + "\n";
        c.check(s->min_eig_potential >= -1e-8, std::string(name) + " potential bound violated: " + fmt_human(s->min_eig_potential));
        c.check(s->min_eig_abs >= -1e-8, std::string(name) + " |H| bound violated: " + fmt_human(s->min_eig_abs));
        c.check(s->h_mu > 0, std::string(name) + " h_mu is not positive");
    }
    t += "# hardy max ratio " + fmt_machine(r.hardy.max_ratio) + " (limit " + fmt_machine(r.hardy.limit) +
         "), free-projected " + fmt_machine(r.hardy.max_ratio_free_projected) + " (limit " +
         fmt_machine(r.hardy.limit_free_projected) + ")\n";
    c.b.tables["bounds.tsv"] = t;
    c.b.summary.push_back("bounds: min eig (potential) p/n " + fmt_human(r.proton.min_eig_potential) + "/" +
                          fmt_human(r.neutron.min_eig_potential) + ", h_mu p/n " + fmt_human(r.proton.h_mu) + "/" +
                          fmt_human(r.neutron.h_mu) + ", Hardy " + fmt_human(r.hardy.max_ratio));
}

void descent(Context& c) {
    LatticePtr lat = make_lattice(c.cfg.lattice);
    std::mt19937_64 rng(c.cfg.seed);
    OrbitalSet start = random_low_energy_orbitals(lat, c.cfg.model, rng, 4);
    RetractionProblem prob{start, {}};
    prob.newton.defect_threshold = c.cfg.defect_threshold;
    RetractionResult ret = retract(prob, c.cfg.model, c.scf.eig);
    DensityMatrixPair gamma = DensityMatrixPair::from_orbitals(ret.output);
    const double E0 = energy(gamma.orbitals(), c.cfg.model).total;
    const CommutatorResidual cr = commutator_residual(gamma, c.cfg.model);

    std::string t = table_header("commutator descent step", {"epsilon", "predicted_change", "measured_change", "abs_error"}, units_energy);
    json arr = json::array();
    for (double eps : c.cfg.probes.descent_epsilons) {
        DescentStep st = commutator_descent_step(gamma, c.cfg.model, eps, c.scf.eig);
        const double measured = energy(st.gamma.orbitals(), c.cfg.model).total - E0;
        const double err = std::abs(measured - st.predicted_change);
        arr.push_back({{"epsilon", eps}, {"predicted", st.predicted_change}, {"measured", measured}, {"abs_error", err}});
        t += fmt_machine(eps) + "\t" + fmt_machine(st.predicted_change) + "\t" + fmt_machine(measured) + "\t" + fmt_machine(err) + "\n";
        c.check(st.predicted_change <= 0.0, "predicted first-order change is positive at epsilon " + fmt_human(eps));
        c.b.summary.push_back("descent eps " + fmt_human(eps) + ": predicted " + fmt_human(st.predicted_change) +
                              ", measured " + fmt_human(measured));
    }
    c.b.results["descent"] = {{"start_energy", E0}, {"start_commutator_residual", cr.max()},
                              {"retraction_iterations", ret.iterations}, {"steps", arr}};
    c.b.tables["descent.tsv"] = t;
}

} // namespace

ResultBundle run(const RunConfig& cfg, const RunOptions& opt) {
    ResultBundle b;
    b.manifest = {{"artifact", "rmf"},
                  {"version", "1.0.0"},
                  {"command", opt.command},
                  {"created", timestamp()},
                  {"simd", kernels::active_isa() == kernels::Isa::avx2 ? "avx2" : "scalar"},
                  {"threads", opt.threads},
                  {"override_regime", opt.override_regime},
                  {"dump_fields", opt.dump_fields},
                  {"config", to_json(cfg)}};
    Context c{cfg, opt, b, cfg.scf};
    c.scf.warn_and_proceed = cfg.scf.warn_and_proceed || opt.override_regime;
    try {
        RegimeReport reg = validate_regime(cfg.model);
        b.results["regime"] = to_json(reg);
        b.summary.push_back("regime: d_p = " + fmt_human(reg.d_p) + ", d_n = " + fmt_human(reg.d_n) +
                            (reg.all_ok() ? " (in regime)" : " (OUT of regime)"));
        if (opt.command == "validate") {
            for (const auto& f : reg.failures()) c.fail(f, exit_regime_refused);
        } else if (!reg.all_ok() && !c.scf.warn_and_proceed) {
            for (const auto& f : reg.failures()) c.fail("regime refusal: " + f, exit_regime_refused);
        } else {
            if (!reg.all_ok()) b.summary.push_back("warning: proceeding outside the validated regime");
            if (opt.command == "solve" || opt.command == "spectrum") {
                SCFReport r = solve_and_check(c);
                if (opt.command == "spectrum" || opt.dump_fields) spectrum_tables(c, r);
                if (opt.dump_fields) fields_table(c, r.orbitals);
                if (opt.command == "solve" && r.converged) {
                    concentration(c, r.orbitals);
                    subadditivity(c);
                    if (cfg.probes.check_bounds) bounds(c, r.orbitals, "SCF solution");
                }
            } else if (opt.command == "probe-subadditivity") {
                if (cfg.probes.subadditivity.empty())
                    throw ConfigError("config", "probes.subadditivity: no lambda vectors configured");
                subadditivity(c);
            } else if (opt.command == "probe-descent") {
                descent(c);
            } else if (opt.command == "check-bounds") {
                LatticePtr lat = make_lattice(cfg.lattice);
                std::mt19937_64 rng(cfg.seed);
                bounds(c, random_low_energy_orbitals(lat, cfg.model, rng, 8, 0.05), "seeded random orbitals");
            } else {
                throw ConfigError("cli-io", "unknown command " + opt.command);
            }
        }
    } catch (const ConfigError& e) {
        c.fail(e.what(), exit_schema_error);
        b.exit_code = exit_schema_error;
    } catch (const RegimeError& e) {
        c.fail(e.what(), exit_regime_refused);
    } catch (const ConvergenceError& e) {
        c.fail(e.what(), exit_not_converged);
    } catch (const Error& e) {
        c.fail(e.what(), exit_runtime_error);
    } catch (const std::exception& e) {
        c.fail(std::string("unexpected: ") + e.what(), exit_runtime_error);
    }
    b.manifest["exit_code"] = b.exit_code;
    b.manifest["status"] = b.exit_code == exit_ok ? "ok" : "failed";
    b.manifest["failures"] = b.failures;
    return b;
}

} // namespace rmf
