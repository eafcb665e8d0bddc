// drift-records: command-line front end for the library.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "drift_records/drift_records.hpp"

namespace dr = drift_records;
using nlohmann::json;

namespace {

struct ModelArgs {
    std::string dist = "gumbel";
    double c = 0.0;
    double delta = 0.0;

    dr::LdmConfig config() const { return {dr::parse_distribution(dist), c, delta}; }
};

void add_model(CLI::App* app, ModelArgs& m) {
    app->add_option("--dist", m.dist, "noise law: gumbel, pareto1, dagum:b=,q=, normal:mu=,sigma=, uniform:lo=,hi=, exp:rate=")
        ->capture_default_str();
    app->add_option("--c", m.c, "trend per step")->required();
    app->add_option("--delta", m.delta, "record margin")->required();
}

json model_json(const ModelArgs& m) {
    return {{"dist", dr::parse_distribution(m.dist).spec()}, {"c", m.c}, {"delta", m.delta}};
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<std::uint8_t> read_flags(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dr::ParseError(path + ": cannot open file");
    std::vector<std::uint8_t> flags;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto pos = line.find_last_of(',');
        std::string field = pos == std::string::npos ? line : line.substr(pos + 1);
        field.erase(0, field.find_first_not_of(" \t"));
        field.erase(field.find_last_not_of(" \t") + 1);
        if (field.empty()) continue;
        if (field == "0" || field == "false") {
            flags.push_back(0);
        } else if (field == "1" || field == "true") {
            flags.push_back(1);
        } else if (line_no == 1) {
            continue;  // header
        } else {
            throw dr::ParseError(path + ":" + std::to_string(line_no) + ": flag '" + field + "' is not 0/1");
        }
    }
    if (flags.empty()) throw dr::ParseError(path + ": no flags found");
    return flags;
}

json variance_json(const dr::VarianceEstimate& v) {
    return {{"sigma2", v.sigma2}, {"raw_sigma2", v.raw_sigma2}, {"m", v.m}, {"floored", v.floored},
            {"p_hat", v.p_hat},   {"n", v.n},                   {"gammas", v.gammas}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact, asymptotic and simulated delta-record statistics for the linear drift model"};
    app.require_subcommand(1);

    // prob
    ModelArgs prob_m;
    long prob_n = 0;
    bool prob_asym = false;
    double prob_tol = dr::kDefaultTol;
    auto* prob = app.add_subcommand("prob", "p_{n,delta} by quadrature, or its limit p_delta");
    add_model(prob, prob_m);
    auto* prob_n_opt = prob->add_option("--n", prob_n, "observation index");
    prob->add_flag("--asymptotic", prob_asym, "compute the n -> infinity limit")->excludes(prob_n_opt);
    prob->add_option("--tol", prob_tol, "absolute tolerance")->capture_default_str();

    // classify
    ModelArgs cls_m;
    auto* cls = app.add_subcommand("classify", "positivity of p_delta and finiteness of the total record count");
    add_model(cls, cls_m);

    // closed-form
    std::string cf_model, cf_what;
    double cf_c = 1.0, cf_delta = 0.0, cf_q = 1.0;
    long cf_n = 2;
    auto* cf = app.add_subcommand("closed-form", "exact Gumbel, Dagum and unit Pareto formulas");
    cf->add_option("--model", cf_model, "gumbel | dagum | pareto")->required()->check(CLI::IsMember({"gumbel", "dagum", "pareto"}));
    cf->add_option("--what", cf_what,
                   "gumbel: p_n, p_delta, l_inf, argmax; dagum: p_n0, p_n0_asymptotic, p_n_eq_c; pareto: p_n, l_n")
        ->required();
    cf->add_option("--c", cf_c, "trend (gumbel)")->capture_default_str();
    cf->add_option("--delta", cf_delta, "record margin (gumbel, pareto)")->capture_default_str();
    cf->add_option("--q", cf_q, "Dagum shape q")->capture_default_str();
    cf->add_option("--n", cf_n, "observation index")->capture_default_str();

    // corr
    ModelArgs corr_m;
    long corr_n = 2;
    double corr_tol = dr::kDefaultTol;
    auto* corr = app.add_subcommand("corr", "dependence index of consecutive delta-record indicators");
    add_model(corr, corr_m);
    corr->add_option("--n", corr_n, "observation index")->required();
    corr->add_option("--tol", corr_tol, "absolute tolerance")->capture_default_str();

    // simulate
    ModelArgs sim_m;
    dr::SimulationConfig sim_cfg;
    std::string sim_dump;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo record counts");
    add_model(sim, sim_m);
    sim->add_option("--n", sim_cfg.n, "horizon")->required();
    sim->add_option("--reps", sim_cfg.replications, "replications")->required();
    sim->add_option("--seed", sim_cfg.seed, "seed")->capture_default_str();
    sim->add_option("--burn-in", sim_cfg.burn_in, "uncounted prefix length")->capture_default_str();
    sim->add_option("--workers", sim_cfg.workers, "threads (0 = all cores)")->capture_default_str();
    sim->add_option("--dump", sim_dump, "write per-replication counts to this CSV");

    // variance
    std::string var_flags;
    std::optional<long> var_m;
    auto* var = app.add_subcommand("variance", "lag-window variance estimate from a 0/1 indicator CSV");
    var->add_option("--flags", var_flags, "CSV with one 0/1 flag per row (last column is used)")->required();
    var->add_option("--m", var_m, "lag window (default floor(sqrt(n)))");

    // sigma2
    ModelArgs s2_m;
    dr::AsymptoticVarianceConfig s2_cfg;
    bool s2_verbatim = false;
    auto* s2 = app.add_subcommand("sigma2", "Monte Carlo estimate of the CLT variance");
    add_model(s2, s2_m);
    s2->add_option("--lag-max", s2_cfg.lag_max, "largest lag")->capture_default_str();
    s2->add_option("--horizon", s2_cfg.horizon, "counted observations per path")->capture_default_str();
    s2->add_option("--burn-in", s2_cfg.burn_in, "uncounted prefix length")->capture_default_str();
    s2->add_option("--reps", s2_cfg.replications, "replications")->capture_default_str();
    s2->add_option("--seed", s2_cfg.seed, "seed")->capture_default_str();
    s2->add_option("--workers", s2_cfg.workers, "threads (0 = all cores)")->capture_default_str();
    s2->add_flag("--verbatim", s2_verbatim, "use 2 sum (r_m - p) instead of the centred covariance sum");

    // analyze
    std::string an_input, an_out = "report.json", an_rate, an_hist;
    double an_delta = -1.0, an_level = 0.95;
    std::optional<long> an_m;
    long an_boot = 0;
    std::uint64_t an_seed = 42;
    unsigned an_workers = 1;
    auto* an = app.add_subcommand("analyze", "trend fit, delta-record statistics and bootstrap for a yearly series");
    an->add_option("--input", an_input, "CSV with header t,value")->required();
    an->add_option("--delta", an_delta, "record margin")->capture_default_str();
    an->add_option("--m", an_m, "lag window (default floor(sqrt(n)))");
    an->add_option("--level", an_level, "interval level")->capture_default_str();
    an->add_option("--bootstrap", an_boot, "bootstrap replications (0 = skip, otherwise >= 1000)")->capture_default_str();
    an->add_option("--seed", an_seed, "bootstrap seed")->capture_default_str();
    an->add_option("--workers", an_workers, "bootstrap threads (0 = all cores)")->capture_default_str();
    an->add_option("--out", an_out, "report path")->capture_default_str();
    an->add_option("--rate-path", an_rate, "rate path CSV (default: rate_path.csv next to the report)");
    an->add_option("--histogram", an_hist, "histogram CSV (default: histogram.csv next to the report)");

    // fixture
    std::string fx_out = "data/synthetic_july_tmax.csv";
    std::uint64_t fx_seed = dr::kFixtureSeed;
    std::uint64_t fx_search = 0;
    auto* fx = app.add_subcommand("fixture", "write the calibrated synthetic yearly series");
    fx->add_option("--out", fx_out, "output CSV")->capture_default_str();
    fx->add_option("--seed", fx_seed, "generator seed")->capture_default_str();
    fx->add_option("--search", fx_search, "search seeds [0, N) for the calibration targets and use the first hit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*prob) {
            const auto cfg = prob_m.config();
            json j = model_json(prob_m);
            if (prob_asym) {
                const auto r = dr::p_delta(cfg, prob_tol);
                j.update({{"quantity", "p_delta"}, {"value", r.value}, {"abs_error_bound", r.abs_error_bound},
                          {"truncation_n", r.truncation_n}, {"positive", dr::classify_positivity(cfg)}});
            } else {
                if (prob_n < 1) throw dr::DomainError("prob: pass --n >= 1 or --asymptotic");
                const auto r = dr::p_n_delta(cfg, prob_n, prob_tol);
                j.update({{"quantity", "p_n_delta"}, {"n", prob_n}, {"value", r.value},
                          {"abs_error_bound", r.abs_error_bound}});
            }
            print(j);
        } else if (*cls) {
            const auto cfg = cls_m.config();
            const auto v = dr::classify_finiteness(cfg);
            json j = model_json(cls_m);
            j.update({{"p_delta_positive", dr::classify_positivity(cfg)},
                      {"total_records", dr::to_string(v.verdict)},
                      {"reason", dr::to_string(v.reason)},
                      {"integral", v.integral_value ? json(*v.integral_value) : json(nullptr)}});
            print(j);
        } else if (*cf) {
            namespace cfm = dr::closed_form;
            json j{{"model", cf_model}, {"what", cf_what}};
            if (cf_model == "gumbel") {
                j.update({{"c", cf_c}, {"delta", cf_delta}});
                if (cf_what == "p_n") j.update({{"n", cf_n}, {"value", cfm::gumbel_p_n_delta(cf_c, cf_delta, cf_n)}});
                else if (cf_what == "p_delta") j["value"] = cfm::gumbel_p_delta(cf_c, cf_delta);
                else if (cf_what == "l_inf") j["value"] = cfm::gumbel_l_inf(cf_c, cf_delta);
                else if (cf_what == "argmax") {
                    const auto a = cfm::gumbel_l_inf_argmax(cf_c);
                    j.erase("delta");
                    j.update({{"delta_star", a.delta_star}, {"max_value", a.max_value}});
                } else
                    throw dr::DomainError("closed-form: unknown gumbel quantity '" + cf_what + "'");
            } else if (cf_model == "dagum") {
                j.update({{"q", cf_q}, {"n", cf_n}});
                if (cf_what == "p_n0") j["value"] = cfm::dagum_p_n0({cf_q, cf_n});
                else if (cf_what == "p_n0_asymptotic") j["value"] = cfm::dagum_p_n0_asymptotic(cf_q, static_cast<double>(cf_n));
                else if (cf_what == "p_n_eq_c") j["value"] = cfm::dagum_p_n_delta_eq_c(cf_q, cf_n);
                else
                    throw dr::DomainError("closed-form: unknown dagum quantity '" + cf_what + "'");
            } else {
                j.update({{"c", 1.0}, {"delta", cf_delta}, {"n", cf_n}});
                if (cf_what == "p_n") j["value"] = cfm::pareto_p_n_delta(cf_delta, cf_n);
                else if (cf_what == "l_n") j["value"] = cfm::pareto_l_n(cf_delta, cf_n);
                else
                    throw dr::DomainError("closed-form: unknown pareto quantity '" + cf_what + "'");
            }
            print(j);
        } else if (*corr) {
            const auto d = dr::dependence_index(corr_m.config(), corr_n, corr_tol);
            json j = model_json(corr_m);
            j.update({{"n", corr_n},
                      {"l_n", d.l_n},
                      {"joint", d.joint},
                      {"p_n", d.p_n},
                      {"p_n1", d.p_n1},
                      {"branch", dr::to_string(d.branch)},
                      {"error_bounds", {{"l_n", d.l_n_error}, {"joint", d.joint_error}, {"p_n", d.p_n_error}, {"p_n1", d.p_n1_error}}}});
            print(j);
        } else if (*sim) {
            sim_cfg.ldm = sim_m.config();
            const auto s = dr::mc_record_rate(sim_cfg);
            if (!sim_dump.empty()) {
                std::ofstream out(sim_dump);
                if (!out) throw dr::ParseError(sim_dump + ": cannot open for writing");
                out << "replication,count,last_record\n";
                for (std::size_t r = 0; r < s.counts.size(); ++r) out << r << ',' << s.counts[r] << ',' << s.last_record[r] << '\n';
            }
            json j = model_json(sim_m);
            j.update({{"n", sim_cfg.n},
                      {"replications", sim_cfg.replications},
                      {"seed", sim_cfg.seed},
                      {"burn_in", sim_cfg.burn_in},
                      {"mean_rate", s.mean_rate},
                      {"rate_stderr", s.rate_stderr},
                      {"mean_count", s.mean_count},
                      {"count_stderr", s.count_stderr},
                      {"stabilization_fraction", s.stabilization_fraction}});
            print(j);
        } else if (*var) {
            dr::RecordFlags flags;
            flags.flags = read_flags(var_flags);
            const auto v = var_m ? dr::variance_estimator(flags, *var_m) : dr::variance_estimator(flags);
            print(variance_json(v));
        } else if (*s2) {
            s2_cfg.ldm = s2_m.config();
            s2_cfg.reading = s2_verbatim ? dr::SummandReading::Verbatim : dr::SummandReading::CenteredCovariance;
            const auto r = dr::asymptotic_variance_mc(s2_cfg);
            json j = model_json(s2_m);
            j.update({{"reading", s2_verbatim ? "verbatim" : "centered_covariance"},
                      {"sigma2", r.sigma2},
                      {"raw_sigma2", r.raw_sigma2},
                      {"floored", r.floored},
                      {"p_hat", r.p_hat},
                      {"lag_max", s2_cfg.lag_max},
                      {"horizon", s2_cfg.horizon},
                      {"burn_in", s2_cfg.burn_in},
                      {"replications", s2_cfg.replications},
                      {"covariances", r.covariances}});
            print(j);
        } else if (*an) {
            const auto ts = dr::load_series(an_input);
            const auto rep = dr::analyze(ts, an_delta, an_m, an_level);
            const auto dir = std::filesystem::path(an_out).parent_path();
            if (an_rate.empty()) an_rate = (dir / "rate_path.csv").string();
            if (an_hist.empty()) an_hist = (dir / "histogram.csv").string();
            for (const auto& path : {an_out, an_rate, an_hist}) {
                const auto parent = std::filesystem::path(path).parent_path();
                if (!parent.empty()) std::filesystem::create_directories(parent);
            }

            json report{
                {"schema_version", 1},
                {"input", an_input},
                {"n", rep.n},
                {"delta", rep.delta},
                {"count", rep.count},
                {"record_count", rep.record_count},
                {"p_hat", rep.p_hat},
                {"sigma2_tilde", rep.variance.sigma2},
                {"sigma2_floored", rep.variance.floored},
                {"m", rep.variance.m},
                {"gammas", rep.variance.gammas},
                {"level", rep.level},
                {"interval", {{"lo", rep.interval.lo}, {"hi", rep.interval.hi}}},
                {"fit",
                 {{"beta0", rep.fit.beta0},
                  {"beta1", rep.fit.beta1},
                  {"stderr0", rep.fit.stderr0},
                  {"stderr1", rep.fit.stderr1},
                  {"t_stat0", rep.fit.t_stat0},
                  {"t_stat1", rep.fit.t_stat1},
                  {"r2", rep.fit.r2},
                  {"adj_r2", rep.fit.adj_r2},
                  {"sigma", rep.fit.sigma}}},
                {"diagnostics",
                 {{"residual_autocorrelation", rep.diagnostics.autocorrelation},
                  {"residual_mean", rep.diagnostics.mean},
                  {"residual_sd", rep.diagnostics.sd},
                  {"residual_skewness", rep.diagnostics.skewness},
                  {"residual_excess_kurtosis", rep.diagnostics.excess_kurtosis},
                  {"kpss", "not computed"},
                  {"shapiro_wilk", "not computed"}}},
                {"rate_path", rep.rate_path},
                {"bootstrap", nullptr}};

            {
                std::ofstream out(an_rate);
                if (!out) throw dr::ParseError(an_rate + ": cannot open for writing");
                out << "t,index,count,rate,is_record,value,residual\n";
                long count = 0;
                out.precision(10);
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    count += rep.flags.flags[i];
                    out << ts.t[i] << ',' << i + 1 << ',' << count << ',' << rep.rate_path[i] << ','
                        << int(rep.flags.flags[i]) << ',' << ts.value[i] << ',' << rep.fit.residuals[i] << '\n';
                }
            }
            if (an_boot > 0) {
                const auto b = dr::bootstrap_histogram(rep.fit, ts, an_delta, an_boot, an_seed, an_workers);
                report["bootstrap"] = {{"replications", b.replications}, {"seed", an_seed}, {"q025", b.q025},
                                       {"q975", b.q975},                 {"mean", b.mean}, {"variance", b.variance}};
                std::ofstream out(an_hist);
                if (!out) throw dr::ParseError(an_hist + ": cannot open for writing");
                out << "count,frequency\n";
                for (std::size_t k = 0; k < b.histogram.size(); ++k) out << k << ',' << b.histogram[k] << '\n';
            }
            std::ofstream out(an_out);
            if (!out) throw dr::ParseError(an_out + ": cannot open for writing");
            out << report.dump(2) << '\n';
            print({{"report", an_out}, {"rate_path", an_rate}, {"histogram", an_boot > 0 ? json(an_hist) : json(nullptr)},
                   {"count", rep.count}, {"p_hat", rep.p_hat}, {"sigma2_tilde", rep.variance.sigma2},
                   {"interval", {{"lo", rep.interval.lo}, {"hi", rep.interval.hi}}}});
        } else if (*fx) {
            if (fx_search > 0) {
                const auto hit = dr::search_fixture_seed(fx_search);
                if (!hit) throw dr::DomainError("fixture: no seed below the search limit meets the targets");
                fx_seed = hit->seed;
            }
            const auto ts = dr::generate_fixture(fx_seed);
            const auto score = dr::score_fixture(fx_seed);
            const auto out_path = std::filesystem::path(fx_out);
            if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
            std::ofstream out(fx_out);
            if (!out) throw dr::ParseError(fx_out + ": cannot open for writing");
            dr::write_series(out, ts);
            print({{"out", fx_out}, {"seed", fx_seed}, {"count_delta_minus_1", score.count},
                   {"record_count", score.record_count}, {"sigma2_m8", score.sigma2_m8}, {"spread_m678", score.spread_m678}});
        }
    } catch (const dr::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const dr::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const dr::QuadratureError& e) {
        std::cerr << "error: " << e.what() << " (best estimate " << e.best_estimate() << ", error estimate "
                  << e.error_estimate() << ")\n";
        return 3;
    } catch (const dr::UndecidedError& e) {
        std::cerr << "error: " << e.what() << " (partial integral " << e.last_partial_integral() << ")\n";
        return 3;
    } catch (const dr::IllConditionedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
