// matchstat: distributions of maximal crossings and nestings of random
// matchings -- exact enumeration, big-float determinant evaluation,
// Painleve II / Tracy-Widom limit laws, asymptotic-expansion verification,
// and a non-intersecting-walk Monte Carlo.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "matchstat/asymptotics.hpp"
#include "matchstat/distributions.hpp"
#include "matchstat/matching.hpp"
#include "matchstat/moments.hpp"
#include "matchstat/painleve.hpp"
#include "matchstat/walks.hpp"

using json = nlohmann::ordered_json;
using namespace matchstat;

namespace {

struct Output {
    std::string path;  // empty = stdout

    void write(const std::string& payload) const {
        if (path.empty()) {
            std::cout << payload;
            if (payload.empty() || payload.back() != '\n') std::cout << "\n";
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ValidationError("cannot open output file " + path);
        f << payload;
        if (payload.empty() || payload.back() != '\n') f << "\n";
    }

    void write(const json& j) const { write(j.dump(2)); }
};

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw ValidationError("empty grid: " + csv);
    return out;
}

json point_json(const DistributionPoint& p) {
    json j;
    j["schema"] = 1;
    j["params"] = {{"t", p.t}, {"k", p.k}, {"j", p.j}};
    j["value_decimal"] = p.value.to_string(40);
    j["route"] = route_name(p.route);
    j["prec_bits"] = p.prec_bits;
    j["certificate"] = {{"agreed_bits", p.certified_bits}};
    return j;
}

json series_json(const ResidualSeries& s, bool pass, double slope_lo, double slope_hi) {
    json pts = json::array();
    for (const auto& p : s.points)
        pts.push_back({{"t", p.t}, {"exact", p.exact}, {"approx", p.approx},
                       {"residual", p.residual}});
    json j;
    j["schema"] = 1;
    j["points"] = pts;
    j["fitted_slope"] = s.slope;
    j["slope_window"] = {slope_lo, slope_hi};
    j["pass"] = pass;
    return j;
}

const HmSolution& shared_hm() {
    static HmSolution hm = solve_hastings_mcleod();
    return hm;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"crossing/nesting statistics of random matchings"};

    // ---- global options -------------------------------------------------
    Output out;
    int threads = 0;
    app.add_option("--output", out.path, "write the report to this file instead of stdout");
    app.add_option("--threads", threads, "cap worker threads (default: all, or MATCHSTAT_THREADS)");

    // ---- enumerate ------------------------------------------------------
    auto* cmd_enum = app.add_subcommand("enumerate", "list all matchings of [2n]");
    int en_n = 2;
    cmd_enum->add_option("--n", en_n, "number of arcs")->required();

    // ---- table ----------------------------------------------------------
    auto* cmd_table = app.add_subcommand("table", "cumulative crossing/nesting counts as CSV");
    int tb_n = 2;
    cmd_table->add_option("--n", tb_n, "number of arcs")->required();

    // ---- cov ------------------------------------------------------------
    auto* cmd_cov = app.add_subcommand("cov", "exact covariance/correlation of (cro, nes)");
    int cv_n = 2;
    cmd_cov->add_option("--n", cv_n, "number of arcs")->required();

    // ---- sample ---------------------------------------------------------
    auto* cmd_sample = app.add_subcommand("sample", "uniform random matchings / MC covariance");
    int sm_n = 2, sm_reps = 1;
    std::uint64_t sm_seed = 0;
    cmd_sample->add_option("--n", sm_n, "number of arcs")->required();
    cmd_sample->add_option("--reps", sm_reps, "replicas; 1 prints the matching itself");
    cmd_sample->add_option("--seed", sm_seed, "RNG seed");

    // ---- moments ----------------------------------------------------------
    auto* cmd_mom = app.add_subcommand("moments", "weight moments h_l");
    std::string mo_kind = "continuous";
    double mo_t = 1.0;
    long mo_l = 0;
    int mo_m = 1;
    long mo_prec = 128;
    cmd_mom->add_option("--kind", mo_kind, "discrete|continuous");
    cmd_mom->add_option("--t", mo_t, "weight parameter t");
    cmd_mom->add_option("--l", mo_l, "moment index");
    cmd_mom->add_option("--m", mo_m, "half atom count (discrete)");
    cmd_mom->add_option("--prec", mo_prec, "precision bits");

    // ---- det --------------------------------------------------------------
    auto* cmd_det = app.add_subcommand("det", "certified determinants (debug)");
    std::string dt_kind = "continuous";
    double dt_t = 1.0;
    int dt_j = 2, dt_k = 2;
    long dt_prec = 80;
    cmd_det->add_option("--kind", dt_kind, "discrete|continuous");
    cmd_det->add_option("--t", dt_t, "weight parameter t");
    cmd_det->add_option("--j", dt_j, "determinant size");
    cmd_det->add_option("--k", dt_k, "crossing bound (sets m = j+k+1 for discrete)");
    cmd_det->add_option("--prec", dt_prec, "certificate bits");

    // ---- cdf --------------------------------------------------------------
    auto* cmd_cdf = app.add_subcommand("cdf", "distribution values");
    std::string cdf_which = "joint";
    double cdf_t = 1.0;
    int cdf_k = 2, cdf_j = 2, cdf_l = 2;
    long cdf_prec = 80;
    std::string cdf_route = "det";
    cmd_cdf->add_option("which", cdf_which, "joint|nes|lt")->required();
    cmd_cdf->add_option("--t", cdf_t, "Poissonization parameter");
    cmd_cdf->add_option("--k", cdf_k, "crossing bound");
    cmd_cdf->add_option("--j", cdf_j, "nesting bound");
    cmd_cdf->add_option("--l", cdf_l, "length bound (lt)");
    cmd_cdf->add_option("--prec", cdf_prec, "certificate bits");
    cmd_cdf->add_option("--route", cdf_route, "det|prop1");

    // ---- tw ----------------------------------------------------------------
    auto* cmd_tw = app.add_subcommand("tw", "Tracy-Widom CDF and derivatives");
    std::string tw_which = "goe";
    double tw_x = 0.0;
    int tw_deriv = 0;
    cmd_tw->add_option("--which", tw_which, "goe|gue");
    cmd_tw->add_option("--x", tw_x, "evaluation point")->required();
    cmd_tw->add_option("--deriv", tw_deriv, "0=F, 1=F', 2=F''");

    // ---- tw-table ----------------------------------------------------------
    auto* cmd_twt = app.add_subcommand("tw-table", "CSV dump of both Tracy-Widom laws");
    double twt_min = -8.0, twt_max = 6.0, twt_step = 0.25;
    cmd_twt->add_option("--xmin", twt_min, "left end");
    cmd_twt->add_option("--xmax", twt_max, "right end");
    cmd_twt->add_option("--step", twt_step, "grid step");

    // ---- verify -------------------------------------------------------------
    auto* cmd_verify = app.add_subcommand("verify", "asymptotic-expansion harnesses");
    std::string vf_which = "thm13";
    std::string vf_tgrid = "20,40,80,160";
    double vf_x = 0.0, vf_xp = 0.0;
    long vf_prec = 80;
    cmd_verify->add_option("which", vf_which, "thm11|thm13|thm15|prop62|prop63|cor12")
        ->required();
    cmd_verify->add_option("--tgrid", vf_tgrid, "comma-separated t values");
    cmd_verify->add_option("--x", vf_x, "scaled coordinate");
    cmd_verify->add_option("--xp", vf_xp, "second scaled coordinate (thm11)");
    cmd_verify->add_option("--prec", vf_prec, "certificate bits");

    // ---- walks -----------------------------------------------------------------
    auto* cmd_walks = app.add_subcommand("walks", "non-intersecting walk Monte Carlo");
    double wk_t = 0.4;
    int wk_n = 2;
    long wk_reps = 100000;
    std::uint64_t wk_seed = 0;
    cmd_walks->add_option("--t", wk_t, "horizon");
    cmd_walks->add_option("--N", wk_n, "number of walkers");
    cmd_walks->add_option("--reps", wk_reps, "replicas");
    cmd_walks->add_option("--seed", wk_seed, "RNG seed");

    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (threads <= 0)
        if (const char* env = std::getenv("MATCHSTAT_THREADS")) threads = std::atoi(env);
    if (threads > 0) omp_set_num_threads(threads);

    if (*cmd_enum) {
        std::ostringstream lines;
        enumerate_matchings(en_n, [&](const Matching& m) {
            for (std::size_t i = 0; i < m.arcs.size(); i++) {
                if (i) lines << ' ';
                lines << m.arcs[i].first << '-' << m.arcs[i].second;
            }
            lines << '\n';
        });
        out.write(lines.str());
    } else if (*cmd_table) {
        out.write(joint_count_table(tb_n).to_csv());
    } else if (*cmd_cov) {
        const CovCor cc = exact_cov_cor(cv_n);
        json j;
        j["schema"] = 1;
        j["n"] = cv_n;
        j["count"] = odd_double_factorial(cv_n);
        j["covariance"] = cc.covariance.get_str();
        j["covariance_decimal"] = rational_to_decimal(cc.covariance, 10);
        if (cc.degenerate) {
            j["correlation"] = nullptr;
        } else {
            j["correlation"] = std::stod(rational_to_decimal(cc.correlation, 17));
            j["correlation_decimal"] = rational_to_decimal(cc.correlation, 10);
        }
        out.write(j);
    } else if (*cmd_sample) {
        if (sm_reps <= 1) {
            const Matching m = sample_matching(sm_n, sm_seed);
            json arcs = json::array();
            for (auto& [a, b] : m.arcs) arcs.push_back({a, b});
            json j;
            j["schema"] = 1;
            j["n"] = sm_n;
            j["seed"] = sm_seed;
            j["arcs"] = arcs;
            j["cro"] = max_crossing(m);
            j["nes"] = max_nesting(m);
            out.write(j);
        } else {
            const McCovariance mc = mc_scaled_covariance(sm_n, sm_reps, sm_seed);
            json j;
            j["schema"] = 1;
            j["n"] = sm_n;
            j["reps"] = sm_reps;
            j["seed"] = sm_seed;
            j["scaled_covariance"] = mc.estimate;
            j["stderr"] = mc.stderr_jackknife;
            out.write(j);
        }
    } else if (*cmd_mom) {
        BigReal v = (mo_kind == "discrete") ? moment_discrete(mo_l, mo_m, mo_t, mo_prec)
                                            : moment_continuous(mo_l, mo_t, mo_prec);
        json j;
        j["schema"] = 1;
        j["params"] = {{"kind", mo_kind}, {"t", mo_t}, {"l", mo_l}, {"m", mo_m}};
        j["prec_bits"] = mo_prec;
        j["value_decimal"] = v.to_string();
        out.write(j);
    } else if (*cmd_det) {
        json j;
        j["schema"] = 1;
        Certified c = (dt_kind == "discrete")
                          ? toeplitz_minus_hankel_det(MeasureKind::Discrete, dt_j + dt_k + 1,
                                                      dt_t, dt_j, dt_prec)
                          : toeplitz_minus_hankel_det(MeasureKind::Continuous, 0, dt_t, dt_j,
                                                      dt_prec);
        j["params"] = {{"kind", dt_kind}, {"t", dt_t}, {"j", dt_j}, {"k", dt_k}};
        j["value_decimal"] = c.value.to_string(40);
        j["prec_bits"] = c.prec_bits;
        j["certificate"] = {{"agreed_bits", c.agreed_bits}};
        out.write(j);
    } else if (*cmd_cdf) {
        if (cdf_route != "det" && cdf_route != "prop1")
            throw ValidationError("route must be det or prop1");
        DistributionPoint p;
        if (cdf_which == "joint") {
            p = joint_cdf(cdf_t, cdf_k, cdf_j, cdf_prec);
            if (cdf_route == "prop1") {
                BigReal log_p = log_joint_cdf_quadrature(cdf_t, cdf_k, cdf_j, cdf_prec + 64);
                p.value = exp(log_p);
                p.route = Route::Prop1Quadrature;
            }
        } else if (cdf_which == "nes") {
            p = nes_marginal_cdf(cdf_t, cdf_j, cdf_prec);
            if (cdf_route == "prop1") {
                BigReal log_p = log_marginal_cdf_quadrature(cdf_t, cdf_j, cdf_prec + 64);
                p.value = exp(log_p);
                p.route = Route::Prop1Quadrature;
            }
        } else if (cdf_which == "lt") {
            if (cdf_route == "prop1")
                throw ValidationError("lt exposes only the determinant route");
            p = lis_length_cdf(cdf_t, cdf_l, cdf_prec);
        } else {
            throw ValidationError("cdf expects joint|nes|lt");
        }
        out.write(point_json(p));
    } else if (*cmd_tw) {
        const HmSolution& hm = shared_hm();
        const Ensemble which = (tw_which == "gue") ? Ensemble::GUE : Ensemble::GOE;
        double v = 0;
        if (tw_deriv == 0)
            v = hm.cdf(which, tw_x);
        else if (tw_deriv == 1)
            v = hm.pdf(which, tw_x);
        else if (tw_deriv == 2)
            v = hm.pdf_prime(which, tw_x);
        else
            throw ValidationError("--deriv must be 0, 1 or 2");
        json j;
        j["schema"] = 1;
        j["params"] = {{"which", tw_which}, {"x", tw_x}, {"deriv", tw_deriv}};
        j["value"] = v;
        out.write(j);
    } else if (*cmd_twt) {
        if (!(twt_step > 0) || twt_max < twt_min) throw ValidationError("bad tw-table grid");
        const HmSolution& hm = shared_hm();
        std::ostringstream csv;
        csv << "x,goe_cdf,goe_pdf,goe_pdf_prime,gue_cdf,gue_pdf,gue_pdf_prime\n";
        char line[256];
        for (double x = twt_min; x <= twt_max + 1e-12; x += twt_step) {
            std::snprintf(line, sizeof line, "%.6f,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n", x,
                          hm.cdf(Ensemble::GOE, x), hm.pdf(Ensemble::GOE, x),
                          hm.pdf_prime(Ensemble::GOE, x), hm.cdf(Ensemble::GUE, x),
                          hm.pdf(Ensemble::GUE, x), hm.pdf_prime(Ensemble::GUE, x));
            csv << line;
        }
        out.write(csv.str());
    } else if (*cmd_verify) {
        const std::vector<double> tgrid = parse_grid(vf_tgrid);
        if (vf_which == "cor12") {
            json pts = json::array();
            bool decreasing = true;
            double prev_gap = HUGE_VAL;
            for (double t : tgrid) {
                CovarianceResult c = poissonized_covariance(t, vf_prec);
                const double gap = std::fabs(c.covariance - 0.25);
                decreasing = decreasing && (gap < prev_gap);
                prev_gap = gap;
                pts.push_back({{"t", t},
                               {"covariance", c.covariance},
                               {"gap_to_quarter", gap},
                               {"truncation_bound", c.truncation_bound},
                               {"box", c.box}});
            }
            json j;
            j["schema"] = 1;
            j["points"] = pts;
            j["pass"] = decreasing;
            out.write(j);
            return 0;
        }
        const HmSolution& hm = shared_hm();
        ResidualSeries s;
        double lo = -1.4, hi = -0.7;
        if (vf_which == "thm11") {
            s = verify_joint_expansion(hm, vf_x, vf_xp, tgrid, vf_prec);
            lo = -HUGE_VAL;
        } else if (vf_which == "thm13") {
            s = verify_marginal_expansion(hm, vf_x, tgrid, vf_prec);
        } else if (vf_which == "thm15") {
            s = verify_lis_expansion(hm, vf_x, tgrid, vf_prec);
        } else if (vf_which == "prop62") {
            s = verify_prop62(hm, tgrid, vf_prec);
            lo = -1.8;
            hi = -0.9;
        } else if (vf_which == "prop63") {
            s = verify_prop63(hm, tgrid, vf_prec);
            lo = -1.8;
            hi = -0.9;
        } else {
            throw ValidationError("verify expects thm11|thm13|thm15|prop62|prop63|cor12");
        }
        out.write(series_json(s, s.slope >= lo && s.slope <= hi, lo, hi));
    } else if (*cmd_walks) {
        const HeightDepthLaw law = conditional_height_depth(wk_t, wk_n, wk_reps, wk_seed);
        std::ostringstream csv;
        csv << "K,J,count,empirical_cdf,oracle_cdf\n";
        char line[160];
        for (int k = 0; k <= law.k_max; k++) {
            for (int j = 0; j <= wk_n; j++) {
                if (!law.count(k, j)) continue;
                const double oracle = joint_cdf(wk_t, k, j, 60).value.to_double();
                std::snprintf(line, sizeof line, "%d,%d,%llu,%.8f,%.8f\n", k, j,
                              static_cast<unsigned long long>(law.count(k, j)), law.cdf(k, j),
                              oracle);
                csv << line;
            }
        }
        out.write(csv.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const Error& e) {
        json j;
        j["schema"] = 1;
        j["error_kind"] = e.kind();
        j["error"] = e.what();
        std::cerr << j.dump(2) << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
