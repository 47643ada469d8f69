// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Every tolerance is pinned here in code.

#include "bfl/config.hpp"
#include "bfl/constitutive.hpp"
#include "bfl/diagnostics.hpp"
#include "bfl/envara.hpp"
#include "bfl/evolution.hpp"
#include "bfl/experiments.hpp"
#include "bfl/grid_ops.hpp"
#include "bfl/runner.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace bfl;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Criterion {
    int number;
    std::string label;
    std::function<bool(std::string&)> body;
};

ModelParams default_params() {
    ModelParams p;
    p.k1 = 1.5;
    p.k2 = 1.0;
    return p;
}

evolution::State default_state(int n, const ModelParams& p) {
    Grid g(n, 2 * kPi);
    ScalarField rho(g), theta(g);
    for (int i = 0; i < n; ++i) {
        const double x = g.center(0, i);
        rho[i] = 1.0 + 0.3 * std::sin(x);
        theta[i] = 1.0 + 0.2 * std::cos(x);
    }
    return evolution::make_initial_state(rho, theta, p);
}

struct RunData {
    std::vector<evolution::State> states;
    std::vector<diagnostics::DiagnosticsRecord> records;
    evolution::RunSummary summary;
};

RunData collect(const evolution::State& init, const evolution::TimeStepConfig& cfg,
                const ModelParams& p) {
    RunData out;
    diagnostics::Accumulator acc(p);
    evolution::State prev = init;
    evolution::RunSinks sinks;
    sinks.on_step = [&](int step, const evolution::State& s,
                        const evolution::StepStats& stats) {
        if (step == 0)
            out.records.push_back(acc.on_start(s));
        else
            out.records.push_back(acc.on_step(prev, s, stats, s.t - prev.t));
        out.states.push_back(s);
        prev = s;
    };
    out.summary = evolution::run(init, cfg, p, sinks);
    return out;
}

bool criterion_constitutive(std::string& detail) {
    ModelParams p = default_params();
    p.enforce_ideal_ratio = true;
    std::mt19937_64 rng(20240301);
    std::uniform_real_distribution<double> span(0.05, 20.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const LocalThermoPoint pt{span(rng), span(rng)};
        const double psi = constitutive::free_energy(pt, p);
        const double s = constitutive::entropy(pt, p);
        const double e = constitutive::internal_energy(pt, p);
        const double pr = constitutive::pressure(pt, p);
        worst = std::max(worst, std::abs(e - (psi + s * pt.theta)) / std::abs(e));
        worst = std::max(worst,
                         std::abs(pr - (pt.rho * constitutive::free_energy_rho(pt, p) - psi)) /
                             pr);
        worst = std::max(worst, std::abs(e - 1.5 * pr) / e);
        worst = std::max(
            worst, std::abs(constitutive::temperature_from_entropy(pt.rho, s, p) - pt.theta) /
                       pt.theta);
    }
    bool ok = worst <= 1e-10;

    // O(h^2) decay of the Gibbs and pressure-identity residuals
    envara::DerivedLaws laws = envara::derive_laws(envara::ideal_gas_model(p), 1e-4);
    const envara::GibbsResidual g1 = envara::gibbs_residual(laws, 1.3, 0.7, 2e-2);
    const envara::GibbsResidual g2 = envara::gibbs_residual(laws, 1.3, 0.7, 1e-2);
    const double gibbs_ratio =
        std::min(g1.r_theta / std::max(g2.r_theta, 1e-300),
                 g1.r_rho / std::max(g2.r_rho, 1e-300));
    ok = ok && gibbs_ratio >= 3.5;

    auto profiles = [&](int samples) {
        std::vector<double> r(samples), t(samples);
        for (int i = 0; i < samples; ++i) {
            const double x = 2 * kPi * i / (samples - 1);
            r[i] = 1.0 + 0.3 * std::sin(x);
            t[i] = 1.0 + 0.2 * std::cos(x);
        }
        return std::make_pair(r, t);
    };
    auto [r65, t65] = profiles(65);
    auto [r129, t129] = profiles(129);
    const double l0a = envara::lemma0_residual(laws, r65, t65, 2 * kPi / 64);
    const double l0b = envara::lemma0_residual(laws, r129, t129, kPi / 64);
    const double lemma0_ratio = l0a / std::max(l0b, 1e-300);
    ok = ok && lemma0_ratio >= 3.5;

    const envara::LemmaCheck lca = envara::lemma12_check(laws, 1.2, 0.4, 2e-3);
    const envara::LemmaCheck lcb = envara::lemma12_check(laws, 1.2, 0.4, 1e-3);
    const double lemma12_ratio = std::min(lca.r1 / std::max(lcb.r1, 1e-300),
                                          lca.r2 / std::max(lcb.r2, 1e-300));
    ok = ok && (lemma12_ratio >= 3.5 || std::max(lcb.r1, lcb.r2) < 1e-10);

    std::ostringstream os;
    os << "identities worst rel " << worst << ", decay ratios gibbs " << gibbs_ratio
       << " lemma0 " << lemma0_ratio << " lemma12 " << lemma12_ratio;
    detail = os.str();
    return ok;
}

bool criterion_brinkman(std::string& detail) {
    using namespace brinkman;
    // manufactured-solution order on n = 32, 64, 128
    auto mms_err = [](int n) {
        Grid g(n, 1.0);
        BrinkmanSystem sys;
        sys.rho = ScalarField(g, 1.0);
        sys.theta = ScalarField(g, 1.0);
        sys.params = default_params();
        VectorField rhs(g);
        for (int i = 0; i < n; ++i) {
            const double x = g.center(0, i);
            rhs[0][i] = sys.params.nu * std::sin(kPi * x) +
                        sys.params.mu * kPi * kPi * std::sin(kPi * x);
        }
        BrinkmanSolution sol = solve_spd(sys, rhs);
        ScalarField diff(g);
        for (int i = 0; i < n; ++i)
            diff[i] = sol.u[0][i] - std::sin(kPi * g.center(0, i));
        return grid_ops::l2_norm(diff);
    };
    const double e32 = mms_err(32), e64 = mms_err(64), e128 = mms_err(128);
    const double r1 = e32 / e64, r2 = e64 / e128;
    bool ok = r1 >= 3.2 && r1 <= 4.8 && r2 >= 3.2 && r2 <= 4.8;

    // energy identity on every solve of a generic sequence
    double worst_energy = 0.0;
    for (int n : {32, 64, 128}) {
        Grid g(n, 2 * kPi);
        BrinkmanSystem sys;
        sys.rho = ScalarField(g);
        sys.theta = ScalarField(g);
        sys.params = default_params();
        sys.solver_tol = 1e-12;
        for (int i = 0; i < n; ++i) {
            const double x = g.center(0, i);
            sys.rho[i] = 1.0 + 0.3 * std::sin(x);
            sys.theta[i] = 1.0 + 0.2 * std::cos(x);
        }
        BrinkmanSolution sol = solve_brinkman(sys);
        worst_energy = std::max(worst_energy, energy_identity_residual(sol.u, sys));
    }
    ok = ok && worst_energy <= std::max(10 * 1e-12, 1e-10);

    // n = 4 dense-LU oracle
    Grid g4(4, 1.0);
    BrinkmanSystem sys4;
    sys4.rho = ScalarField(g4, 1.0);
    sys4.theta = ScalarField(g4, 1.0);
    sys4.params = default_params();
    for (int i = 0; i < 4; ++i) sys4.theta[i] = 1.0 + 0.2 * i;
    std::vector<double> A(16);
    for (int c = 0; c < 4; ++c) {
        VectorField e(g4);
        e[0][c] = 1.0;
        VectorField Ae = apply_operator(sys4, e);
        for (int r = 0; r < 4; ++r) A[r * 4 + c] = Ae[0][r];
    }
    std::vector<double> lu = oracles::dense_solve(A, right_hand_side(sys4)[0]);
    BrinkmanSolution sol4 = solve_brinkman(sys4);
    double lu_gap = 0.0;
    for (int i = 0; i < 4; ++i) lu_gap = std::max(lu_gap, std::abs(sol4.u[0][i] - lu[i]));
    ok = ok && lu_gap <= 1e-10;

    std::ostringstream os;
    os << "mms ratios " << r1 << ", " << r2 << "; energy residual " << worst_energy
       << "; LU gap " << lu_gap;
    detail = os.str();
    return ok;
}

// shared by criteria 3-5
struct ConservationRuns {
    RunData base;       // delta = 0, 500 steps
    RunData with_delta; // delta = 1e-3
    RunData with_delta_half_dt;
    bool ran = false;
};
ConservationRuns g_runs;

void ensure_conservation_runs() {
    if (g_runs.ran) return;
    ModelParams p = default_params();
    evolution::State init = default_state(128, p);
    evolution::TimeStepConfig cfg;
    cfg.dt = 0.002;
    cfg.t_end = 1.0; // 500 steps
    g_runs.base = collect(init, cfg, p);

    ModelParams pd = p;
    pd.delta = 1e-3;
    evolution::State initd = default_state(128, pd);
    g_runs.with_delta = collect(initd, cfg, pd);
    cfg.dt = 0.001;
    g_runs.with_delta_half_dt = collect(initd, cfg, pd);
    g_runs.ran = true;
}

bool criterion_conservation(std::string& detail) {
    ensure_conservation_runs();
    const RunData& run = g_runs.base;
    if (run.summary.cause != evolution::Termination::Completed || run.summary.steps != 500) {
        detail = "base run did not complete 500 steps";
        return false;
    }
    const double mass0 = run.records.front().mass;
    double worst_mass = 0.0, worst_energy = 0.0;
    for (const auto& r : run.records) {
        worst_mass = std::max(worst_mass, std::abs(r.mass - mass0) / mass0);
        worst_energy = std::max(worst_energy, r.energy_balance_residual);
    }
    bool ok = worst_mass <= 1e-12;
    ok = ok && worst_energy <= 100 * 1e-12 * 500;

    // delta = 1e-3: regularized energy balance at dt and dt/2
    const double e0 = g_runs.with_delta.records.front().internal_energy;
    const double res_dt = g_runs.with_delta.records.back().energy_balance_residual / e0;
    const double res_half =
        g_runs.with_delta_half_dt.records.back().energy_balance_residual / e0;
    const double extrapolated = std::abs(2 * res_half - res_dt);
    ok = ok && res_dt <= 1e-6 && res_half <= 1e-6 && extrapolated <= 1e-6;

    std::ostringstream os;
    os << "mass drift " << worst_mass << "; energy residual " << worst_energy
       << "; delta balance rel " << res_dt << " -> " << res_half;
    detail = os.str();
    return ok;
}

bool criterion_second_law(std::string& detail) {
    ensure_conservation_runs();
    double min_sigma = std::numeric_limits<double>::infinity();
    double worst_slack = std::numeric_limits<double>::infinity();
    const double scale = std::abs(g_runs.base.records.front().total_entropy);
    double prev_entropy = g_runs.base.records.front().total_entropy;
    for (std::size_t k = 0; k < g_runs.base.records.size(); ++k) {
        const auto& r = g_runs.base.records[k];
        min_sigma = std::min(min_sigma, r.min_sigma);
        if (k > 0) {
            worst_slack = std::min(worst_slack, r.total_entropy - prev_entropy);
            prev_entropy = r.total_entropy;
        }
    }
    for (const auto& r : g_runs.with_delta.records)
        min_sigma = std::min(min_sigma, r.min_sigma);

    const bool ok = min_sigma >= 0.0 && worst_slack >= -1e-8 * scale;
    std::ostringstream os;
    os << "min sigma " << min_sigma << "; worst per-step entropy slack " << worst_slack;
    detail = os.str();
    return ok;
}

bool criterion_positivity(std::string& detail) {
    ensure_conservation_runs();
    double min_theta = 1e300, min_rho = 1e300;
    for (const auto& r : g_runs.base.records) {
        min_theta = std::min(min_theta, r.min_theta);
        min_rho = std::min(min_rho, r.min_rho);
    }
    for (const auto& r : g_runs.with_delta.records) {
        min_theta = std::min(min_theta, r.min_theta);
        min_rho = std::min(min_rho, r.min_rho);
    }
    bool ok = min_theta > 0.0 && min_rho > 0.0;

    // paired cold-spot runs: the barrier keeps the minimum temperature
    // strictly higher at every common step
    auto run_pair = [](double delta) {
        experiments::Scenario s = experiments::cold_spot_scenario(0.9);
        s.params.delta = delta;
        s.time.dt = 0.002;
        s.time.t_end = 1.0;
        return experiments::run_member(s);
    };
    experiments::MemberRun bare = run_pair(0.0);
    experiments::MemberRun barrier = run_pair(1e-3);
    bool dominated = bare.summary.cause == evolution::Termination::Completed &&
                     barrier.summary.cause == evolution::Termination::Completed;
    int compared = 0;
    for (std::size_t k = 1;
         k < std::min(bare.records.size(), barrier.records.size()) && dominated; ++k) {
        dominated = barrier.records[k].min_theta > bare.records[k].min_theta;
        ++compared;
    }
    ok = ok && dominated && compared >= 400;

    std::ostringstream os;
    os << "min rho " << min_rho << ", min theta " << min_theta
       << "; barrier dominance at " << compared << " steps: " << (dominated ? "yes" : "no");
    detail = os.str();
    return ok;
}

bool criterion_sweeps(std::string& detail) {
    using namespace experiments;
    bool ok = true;
    std::ostringstream os;

    for (SweepAxis axis : {SweepAxis::Mesh, SweepAxis::Eps, SweepAxis::Delta}) {
        SweepSpec spec;
        spec.axis = axis;
        spec.values = axis == SweepAxis::Mesh ? std::vector<double>{128, 64, 32}
                                              : std::vector<double>{1e-2, 1e-3, 1e-4};
        spec.base = default_scenario();
        spec.base.time.t_end = 0.5;
        SweepResult res = run_sweep(spec);
        ok = ok && res.invariants_ok && res.distances_strictly_decreasing;
        os << to_string(axis) << " decreasing " << res.distances_strictly_decreasing << "; ";

        SweepSpec eq = spec;
        eq.base = equilibrium_scenario();
        eq.base.time.t_end = 0.5;
        SweepResult res_eq = run_sweep(eq);
        bool zero = res_eq.invariants_ok;
        for (const auto& row : res_eq.rows) zero = zero && row.dist == 0.0;
        ok = ok && zero;
        os << to_string(axis) << "-equilibrium zero " << zero << "; ";
    }
    detail = os.str();
    return ok;
}

bool criterion_appendix(std::string& detail) {
    using diagnostics::inverse_jensen_bound;
    using diagnostics::reverse_young_check;
    using diagnostics::specht_ratio;

    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    std::uniform_real_distribution<double> nu01(0.0, 1.0);
    bool young_ok = true;
    for (int i = 0; i < 10000; ++i)
        young_ok = young_ok && reverse_young_check(std::pow(10.0, logu(rng)),
                                                   std::pow(10.0, logu(rng)), nu01(rng));

    double sym = 0.0;
    for (double h : {2.0, 5.0, 10.0})
        sym = std::max(sym, std::abs(specht_ratio(h) - specht_ratio(1.0 / h)));
    const bool sym_ok = sym <= 1e-12;

    const double s4 = specht_ratio(4.0);
    const double s4_oracle = static_cast<double>(oracles::specht_long(4.0L));
    const bool s4_ok = std::abs(s4 - 1.2637) <= 1e-3 && std::abs(s4 - s4_oracle) <= 1e-12;

    bool jensen_ok = true;
    const double m = 1.0, M = 2.0, x0 = 1.5, pexp = 3.0;
    for (int wi = 0; wi <= 100 && jensen_ok; ++wi) {
        const double w = wi / 100.0;
        auto b = inverse_jensen_bound({m, M}, {1.0 - w, w}, pexp, m, M, x0);
        jensen_ok = b.lhs <= b.rhs + 1e-12 * (1.0 + std::abs(b.rhs));
    }

    std::ostringstream os;
    os << "young sweep " << young_ok << "; S symmetry " << sym << "; S(4) " << s4
       << "; jensen grid " << jensen_ok;
    detail = os.str();
    return young_ok && sym_ok && s4_ok && jensen_ok;
}

bool criterion_weak_forms(std::string& detail) {
    ModelParams p = default_params();
    struct Level {
        int n;
        double dt;
    };
    std::vector<Level> levels = {{32, 0.016}, {64, 0.008}, {128, 0.004}};
    std::vector<diagnostics::WeakFormResult> results;
    for (const Level& lv : levels) {
        evolution::State init = default_state(lv.n, p);
        evolution::TimeStepConfig cfg;
        cfg.dt = lv.dt;
        cfg.t_end = 0.4;
        RunData run = collect(init, cfg, p);
        if (run.summary.cause != evolution::Termination::Completed) {
            detail = "weak-form run did not complete";
            return false;
        }
        results.push_back(diagnostics::weak_form_residual(run.states, p));
    }

    auto column_ok = [&](auto getter, const char* /*name*/, double zero_floor) {
        bool near_zero = true;
        for (const auto& r : results) near_zero = near_zero && getter(r) <= zero_floor;
        if (near_zero) return true;
        for (std::size_t i = 0; i + 1 < results.size(); ++i) {
            const double order = std::log2(getter(results[i]) / getter(results[i + 1]));
            if (!(order >= 0.9)) return false;
        }
        return true;
    };

    bool ok = column_ok([](const auto& r) { return r.continuity; }, "continuity", 1e-9);
    ok = ok && column_ok([](const auto& r) { return r.brinkman; }, "brinkman", 1e-9);
    ok = ok && column_ok([](const auto& r) { return r.energy; }, "energy", 1e-9);
    ok = ok &&
         column_ok([](const auto& r) { return r.entropy_balance; }, "entropy", 1e-9);
    double worst_violation = 0.0;
    for (const auto& r : results)
        worst_violation = std::max(worst_violation, r.entropy_violation);
    ok = ok && worst_violation <= 1e-8;

    std::ostringstream os;
    os << "continuity " << results[0].continuity << " -> " << results[2].continuity
       << "; entropy " << results[0].entropy_balance << " -> "
       << results[2].entropy_balance << "; violation " << worst_violation;
    detail = os.str();
    return ok;
}

bool criterion_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "bfl_acceptance_det";
    fs::remove_all(base);
    fs::create_directories(base);

    config::RunConfig cfg = config::parse_config(
        R"({"initial": {"preset": "default"}, "time": {"t_end": 0.3},
            "params": {"delta": 1e-3, "eps": 1e-3},
            "output": {"snapshot_cadence": 20}, "seed": 11})");
    const int code_a = runner::simulate(cfg, (base / "a").string());
    const int code_b = runner::simulate(cfg, (base / "b").string());
    if (code_a != 0 || code_b != 0) {
        detail = "simulate exit codes " + std::to_string(code_a) + "/" +
                 std::to_string(code_b);
        return false;
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(base / "a")) {
        const fs::path other = base / "b" / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
            detail = "mismatch in " + entry.path().filename().string();
            return false;
        }
        ++compared;
    }
    detail = std::to_string(compared) + " files byte-identical";
    return compared >= 3;
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "constitutive identity suite", criterion_constitutive},
        {2, "Brinkman solver verification", criterion_brinkman},
        {3, "conservation over the default run", criterion_conservation},
        {4, "second law (pointwise and total)", criterion_second_law},
        {5, "positivity and the barrier effect", criterion_positivity},
        {6, "limit sweeps", criterion_sweeps},
        {7, "appendix inequalities", criterion_appendix},
        {8, "weak-form residuals", criterion_weak_forms},
        {9, "byte-identical determinism", criterion_determinism},
    };

    int failures = 0;
    for (auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d: %s (%.2f s) -- %s\n", ok ? "PASS" : "FAIL",
                    c.number, c.label.c_str(), secs, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures;
}
