// One line per acceptance criterion: "criterion N: PASS|FAIL  <summary>".
// Exit status is nonzero when any criterion fails.

#include "cli_runner.hpp"
#include "core/baselines.hpp"
#include "core/datagen.hpp"
#include "core/eval.hpp"
#include "core/trainer.hpp"
#include "core/wavenet.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace wavecast;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int number, const std::string& title, const std::function<Outcome()>& check)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("criterion %d: %s  %s; %s [%.1fs]\n", number, o.pass ? "PASS" : "FAIL", title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string join(const std::vector<double>& v)
{
    std::ostringstream s;
    s.precision(5);
    for (std::size_t i = 0; i < v.size(); ++i) {
        s << (i ? "," : "") << v[i];
    }
    return s.str();
}

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// --- criterion 1 -------------------------------------------------------------

Outcome gradient_check()
{
    NetworkConfig net;
    net.num_conditions = 2;
    std::mt19937_64 rng(1);
    auto x = oracle::normal_vector(rng, 64);
    std::vector<std::vector<double>> conds{oracle::normal_vector(rng, 64), oracle::normal_vector(rng, 64)};
    NetworkParams p = make_params(net);
    for_each_filter(p, [&](const std::string&, ParamKey, ConvFilter& f) {
        f.weights = oracle::normal_vector(rng, f.weights.size(), 0.7);
        f.bias = oracle::normal_vector(rng, f.bias.size(), 0.1);
    });
    const double gamma = TrainConfig{}.l2_gamma;
    auto e = evaluate_objective(p, net, x, conds, gamma);
    std::size_t checked = 0, bad = 0, kinks = 0;
    double worst = 0.0;
    for_each_filter(p, [&](const std::string&, ParamKey key, ConvFilter& f) {
        const ConvFilter g = e.gradients.at(key);
        auto probe = [&](double& slot, double analytic) {
            const double saved = slot;
            auto d = oracle::finite_difference(
                [&](double v) {
                    slot = v;
                    return evaluate_objective(p, net, x, conds, gamma).objective;
                },
                saved, 1e-5);
            slot = saved;
            ++checked;
            kinks += d.kink;
            if (!d.kink) {
                worst = std::max(worst, oracle::relative_error(analytic, d.central));
            }
            bad += !oracle::gradient_agrees(analytic, d);
        };
        for (std::size_t i = 0; i < f.weights.size(); ++i) {
            probe(f.weights[i], g.weights[i]);
        }
        for (std::size_t i = 0; i < f.bias.size(); ++i) {
            probe(f.bias[i], g.bias[i]);
        }
    });
    std::ostringstream s;
    s << checked << " parameters, max relative error " << worst << ", mismatches " << bad
      << ", stencils across a kink " << kinks;
    return {bad == 0 && checked == parameter_count(net), s.str()};
}

// --- criterion 2 -------------------------------------------------------------

Outcome causality_check()
{
    NetworkConfig net;
    net.num_conditions = 2;
    std::mt19937_64 rng(2);
    NetworkParams p = make_params(net);
    for_each_filter(p, [&](const std::string&, ParamKey, ConvFilter& f) {
        f.weights = oracle::normal_vector(rng, f.weights.size(), 0.7);
        f.bias = oracle::normal_vector(rng, f.bias.size(), 0.1);
    });
    const std::size_t n = 80, r = receptive_field(net);
    auto x = oracle::normal_vector(rng, n);
    std::vector<std::vector<double>> conds{oracle::normal_vector(rng, n), oracle::normal_vector(rng, n)};
    const auto base = forward_conditional(p, net, x, conds);
    std::uniform_int_distribution<std::size_t> pos(0, n - 1), which(0, 2);
    std::size_t future_changes = 0, stale_changes = 0, comparisons = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t t0 = pos(rng), s = which(rng);
        auto x2 = x;
        auto c2 = conds;
        (s == 0 ? x2[t0] : c2[s - 1][t0]) += 0.5 + std::abs(oracle::normal_vector(rng, 1)[0]);
        const auto out = forward_conditional(p, net, x2, c2);
        // out[i] is the prediction for time i made at time i - 1
        for (std::size_t i = 0; i < out.size(); ++i) {
            ++comparisons;
            if (i <= t0 && out[i] != base[i]) {
                ++future_changes;
            }
            if (i > t0 + r && out[i] != base[i]) {
                ++stale_changes;
            }
        }
    }
    std::ostringstream s;
    s << "100 trials, " << comparisons << " outputs compared bitwise, r=" << r << ", changed by a later value: "
      << future_changes << ", changed by a value older than r: " << stale_changes;
    return {future_changes == 0 && stale_changes == 0, s.str()};
}

// --- criteria 3 to 5: Lorenz protocol ----------------------------------------

struct LorenzRun {
    std::vector<double> rmse;  // one per selected network, original X units
    std::vector<double> train_mae;
    MetricSummary summary;
};

const LorenzTrajectory& lorenz_data()
{
    static const LorenzTrajectory t = lorenz_generate(LorenzConfig{});
    return t;
}

// Train on rows [0, 1000), one-step forecasts over [1000, 1500).
LorenzRun lorenz_protocol(bool conditional, bool noise)
{
    const auto& t = lorenz_data();
    SeriesBundle b;
    b.target_name = "X";
    b.target = t.x;
    if (conditional) {
        b.condition_names = {"Y", "Z"};
        b.conditions = {t.y, t.z};
    }
    if (noise) {
        std::mt19937_64 rng(77);
        b.condition_names.push_back("noise");
        b.conditions.push_back(oracle::normal_vector(rng, t.x.size()));
    }
    const std::size_t train_len = 1000, test_end = 1500;
    auto n = normalize(b, train_len);

    NetworkConfig net;
    net.num_conditions = n.conditions.size();
    TrainConfig cfg;
    cfg.jobs = jobs();
    std::vector<double> x(n.target.begin(), n.target.begin() + train_len);
    std::vector<std::vector<double>> ctr;
    for (const auto& c : n.conditions) {
        ctr.emplace_back(c.begin(), c.begin() + train_len);
    }
    auto selected = train_ensemble(net, cfg, x, ctr);

    LorenzRun run;
    for (const auto& rep : selected) {
        auto pred = forward_conditional(rep.final_params, net, n.target, n.conditions);
        std::vector<double> f, a;
        for (std::size_t i = train_len; i < test_end; ++i) {
            f.push_back(n.norm->invert(pred[i]));
            a.push_back(t.x[i]);
        }
        run.rmse.push_back(rmse(f, a));
        run.train_mae.push_back(rep.train_mae);
    }
    run.summary = summarize(run.rmse);
    return run;
}

std::string describe(const char* name, const LorenzRun& r)
{
    std::ostringstream s;
    s.precision(5);
    s << name << " RMSE " << r.summary.mean << " (" << r.summary.std << ") over " << r.rmse.size()
      << " networks [" << join(r.rmse) << "]";
    return s.str();
}

// --- criterion 6 -------------------------------------------------------------

Outcome baseline_check()
{
    std::mt19937_64 rng(6);
    bool naive_exact = true;
    for (int trial = 0; trial < 100; ++trial) {
        auto s = oracle::normal_vector(rng, 50, 1.0 + trial);
        std::vector<double> f, a;
        for (std::size_t i = 1; i < s.size(); ++i) {
            f.push_back(predict_naive(std::span<const double>(s.data(), i)));
            a.push_back(s[i]);
        }
        naive_exact = naive_exact && mase(f, a, f) == 1.0;
    }

    std::vector<double> ar{1.3};
    while (ar.size() < 80) {
        ar.push_back(0.5 * ar.back());
    }
    std::vector<std::vector<double>> one{ar};
    auto m1 = fit_ar(one, 1);
    const double e1 = std::max(std::abs(m1.coefficient(0, 1, 0) - 0.5), std::abs(m1.intercept(0)));

    std::vector<double> x{1.0}, y{-0.7};
    while (x.size() < 60) {
        const double nx = 0.3 * x.back() + 0.2 * y.back();
        const double ny = -0.9 * x.back() + 0.8 * y.back();
        x.push_back(nx);
        y.push_back(ny);
    }
    std::vector<std::vector<double>> two{x, y};
    auto m2 = fit_ar(two, 1);
    const double e2 =
        std::max({std::abs(m2.coefficient(0, 1, 0) - 0.3), std::abs(m2.coefficient(0, 1, 1) - 0.2),
                  std::abs(m2.coefficient(1, 1, 0) + 0.9), std::abs(m2.coefficient(1, 1, 1) - 0.8),
                  std::abs(m2.intercept(0)), std::abs(m2.intercept(1))});
    std::ostringstream s;
    s << "naive MASE exactly 1 on 100 series: " << (naive_exact ? "yes" : "no") << ", AR(1) max error " << e1
      << ", VAR(1) max error " << e2;
    return {naive_exact && e1 < 1e-8 && e2 < 1e-8, s.str()};
}

// --- criterion 7 -------------------------------------------------------------

Outcome synthetic_conditioning_check()
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> rb(0.0, 0.01), eps(0.0, 0.001);
    const std::size_t train_len = 750, test_len = 350, n = train_len + test_len;
    std::vector<double> a{0.0}, b{rb(rng)};
    while (a.size() < n) {
        a.push_back(0.6 * b.back() + eps(rng));
        b.push_back(rb(rng));
    }
    auto evaluate = [&](bool conditional) {
        SeriesBundle bundle;
        bundle.target_name = "A";
        bundle.target = a;
        if (conditional) {
            bundle.condition_names = {"B"};
            bundle.conditions = {b};
        }
        auto nb = normalize(bundle, train_len);
        NetworkConfig net;
        net.num_conditions = nb.conditions.size();
        TrainConfig cfg;
        cfg.jobs = jobs();
        std::vector<double> x(nb.target.begin(), nb.target.begin() + train_len);
        std::vector<std::vector<double>> ctr;
        for (const auto& c : nb.conditions) {
            ctr.emplace_back(c.begin(), c.begin() + train_len);
        }
        auto selected = train_ensemble(net, cfg, x, ctr);
        std::vector<double> scores;
        for (const auto& rep : selected) {
            auto pred = forward_conditional(rep.final_params, net, nb.target, nb.conditions);
            std::vector<double> f, y, naive;
            for (std::size_t i = train_len; i < n; ++i) {
                f.push_back(nb.norm->invert(pred[i]));
                y.push_back(a[i]);
                naive.push_back(a[i - 1]);
            }
            scores.push_back(mase(f, y, naive));
        }
        return scores;
    };
    auto cwn = evaluate(true);
    auto uwn = evaluate(false);
    const double mc = oracle::mean(cwn), mu = oracle::mean(uwn);
    std::ostringstream s;
    s.precision(5);
    s << "cWN MASE " << mc << " [" << join(cwn) << "], uWN MASE " << mu << " [" << join(uwn) << "]";
    return {cwn.size() == 3 && mc < 0.95 && mu >= mc, s.str()};
}

// --- criterion 8 -------------------------------------------------------------

Outcome determinism_check()
{
    auto dir = cli_test::scratch("acceptance_determinism");
    std::vector<std::string> files;
    for (const char* name : {"first", "second"}) {
        const std::string args = "--lorenz --model cwn --cond Y,Z --iterations 2000 --jobs " +
                                 std::to_string(jobs()) + " --out " + (dir / name).string();
        for (const char* cmd : {"train ", "evaluate "}) {
            const int code = cli_test::run(cmd + args, dir / "log");
            if (code != 0) {
                return {false, std::string(cmd) + "exited with " + std::to_string(code) + ": " +
                                   cli_test::slurp(dir / "log")};
            }
        }
        files.push_back(cli_test::slurp(dir / name / "metrics" / "metrics.csv") + "\n--\n" +
                        cli_test::slurp(dir / name / "metrics" / "metrics.txt"));
    }
    return {files[0] == files[1] && !files[0].empty(),
            "two train+evaluate runs, metrics.csv and metrics.txt " +
                std::string(files[0] == files[1] ? "byte-identical" : "differ")};
}

// --- criterion 9 -------------------------------------------------------------

Outcome integrator_check()
{
    const std::size_t samples = 200;
    auto reference = oracle::lorenz_rk4({0.0, 1.0, 1.05}, 0.01, 100, samples);
    auto deviation = [&](std::size_t substeps) {
        LorenzConfig c;
        c.num_points = samples;
        c.substeps = substeps;
        auto t = lorenz_generate(c);
        double worst = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            worst = std::max({worst, std::abs(t.x[i] - reference[i][0]), std::abs(t.y[i] - reference[i][1]),
                              std::abs(t.z[i] - reference[i][2])});
        }
        return worst;
    };
    const double coarse = deviation(1), fine = deviation(2);
    std::ostringstream s;
    s << "max deviation dt=0.01: " << coarse << ", dt=0.005: " << fine << ", ratio " << coarse / fine;
    return {coarse / fine >= 8.0, s.str()};
}

} // namespace

int main()
{
    report(1, "gradient correctness (cWN L=4 k=2 M=1, 2 conditions, length 64)", gradient_check);
    report(2, "causality and receptive field", causality_check);

    LorenzRun uwn, cwn;
    report(3, "Lorenz uWN mean test RMSE on X <= 0.02", [&] {
        uwn = lorenz_protocol(false, false);
        return Outcome{uwn.summary.mean <= 0.02, describe("uWN", uwn)};
    });
    report(4, "cWN (Y, Z) mean RMSE < uWN, cWN std <= 2x uWN std", [&] {
        cwn = lorenz_protocol(true, false);
        const bool better = cwn.summary.mean < uwn.summary.mean;
        const bool spread = cwn.summary.std <= 2.0 * uwn.summary.std;
        return Outcome{!uwn.rmse.empty() && better && spread,
                       describe("cWN", cwn) + "; uWN " + std::to_string(uwn.summary.mean) + " (" +
                           std::to_string(uwn.summary.std) + ")"};
    });
    report(5, "extra noise condition degrades cWN mean RMSE by at most 50%", [&] {
        auto noisy = lorenz_protocol(true, true);
        const double ratio = noisy.summary.mean / cwn.summary.mean;
        return Outcome{!cwn.rmse.empty() && ratio <= 1.5,
                       describe("cWN+noise", noisy) + "; ratio to cWN " + std::to_string(ratio)};
    });
    report(6, "baseline exactness", baseline_check);
    report(7, "synthetic lead-lag conditioning (750/350)", synthetic_conditioning_check);
    report(8, "CLI determinism", determinism_check);
    report(9, "Lorenz integrator step halving", integrator_check);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
