#include "cli_runner.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using cli_test::count_files;
using cli_test::run;
using cli_test::scratch;
using cli_test::slurp;

namespace {

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Small synthetic price file: two columns plus dates.
fs::path write_prices(const fs::path& dir)
{
    auto path = dir / "prices.csv";
    std::ofstream out(path);
    out << "date,a,b\n";
    double a = 100, b = 50;
    for (int i = 0; i < 160; ++i) {
        a *= 1.0 + 0.01 * std::sin(0.7 * i) + 0.002 * std::cos(1.3 * i);
        b *= 1.0 + 0.01 * std::cos(0.4 * i);
        out << "d" << i << "," << a << "," << b << "\n";
    }
    return path;
}

} // namespace

TEST_CASE("help, version and unknown commands")
{
    auto dir = scratch("cli_help");
    CHECK(run("--help", dir / "log") == 0);
    CHECK(slurp(dir / "log").find("generate-lorenz") != std::string::npos);
    CHECK(run("--version", dir / "log") == 0);
    CHECK(run("frobnicate", dir / "log") == 1);
    CHECK(run("train --bogus-flag", dir / "log") == 1);
}

TEST_CASE("generate-lorenz writes the trajectory")
{
    auto dir = scratch("cli_lorenz");
    REQUIRE(run("generate-lorenz --out " + (dir / "l.csv").string(), dir / "log") == 0);
    auto text = slurp(dir / "l.csv");
    CHECK(text.starts_with("X,Y,Z\n0,1,1.05\n"));
    CHECK(lines(text) == 1501);
}

TEST_CASE("network train, evaluate and forecast produce the documented artifacts")
{
    auto dir = scratch("cli_uwn");
    auto data = write_prices(dir);
    const std::string common = "--data " + data.string() + " --target a --timestamp date --returns --model uwn" +
                               " --train-len 60 --test-len 40 --iterations 30 --seeds 2 --seed-pool 3 --out " +
                               (dir / "run").string();
    REQUIRE(run("train " + common, dir / "log") == 0);
    // 159 returns: splits start at 0, 40 (test ranges [60,100), [100,140))
    CHECK(count_files(dir / "run" / "checkpoints") == 4);
    CHECK(count_files(dir / "run" / "traces") == 4);
    CHECK(fs::exists(dir / "run" / "config.toml"));
    CHECK(fs::exists(dir / "run" / "metrics" / "train.csv"));
    CHECK(lines(slurp(dir / "run" / "traces" / "split0_net1.csv")) == 31);

    REQUIRE(run("evaluate " + common, dir / "log") == 0);
    auto metrics = slurp(dir / "run" / "metrics" / "metrics.csv");
    CHECK(metrics.find("uwn split0,rmse") != std::string::npos);
    CHECK(metrics.find("uwn all,mase") != std::string::npos);
    CHECK(fs::exists(dir / "run" / "metrics" / "metrics.txt"));
    auto onestep = slurp(dir / "run" / "forecasts" / "onestep_split1.csv");
    CHECK(onestep.starts_with("row,timestamp,actual,naive,forecast_1,forecast_2,forecast_mean\n"));
    CHECK(lines(onestep) == 41);

    REQUIRE(run("forecast --steps 5 " + common, dir / "log") == 0);
    auto fc = slurp(dir / "run" / "forecasts" / "forecast_split1.csv");
    CHECK(lines(fc) == 6);

    // the same run again from its echoed config file
    REQUIRE(run("evaluate --config " + (dir / "run" / "config.toml").string() + " --out " + (dir / "run").string(),
                dir / "log") == 0);
    CHECK(slurp(dir / "run" / "metrics" / "metrics.csv") == metrics);
}

TEST_CASE("baselines through the CLI")
{
    auto dir = scratch("cli_baselines");
    auto data = write_prices(dir);
    const std::string base = "--data " + data.string() + " --target a --returns --train-len 60 --test-len 40";
    REQUIRE(run("train " + base + " --model naive --out " + (dir / "naive").string(), dir / "log") == 0);
    REQUIRE(run("evaluate " + base + " --model naive --out " + (dir / "naive").string(), dir / "log") == 0);
    auto naive = slurp(dir / "naive" / "metrics" / "metrics.csv");
    CHECK(naive.find("naive split0,mase,1,0,") != std::string::npos);

    REQUIRE(run("train " + base + " --model var --cond b --order 2 --out " + (dir / "var").string(), dir / "log") ==
            0);
    CHECK(fs::exists(dir / "var" / "checkpoints" / "split0_var.json"));
    REQUIRE(run("evaluate " + base + " --model var --cond b --order 2 --out " + (dir / "var").string(),
                dir / "log") == 0);
}

TEST_CASE("input errors map to exit codes before anything is written")
{
    auto dir = scratch("cli_errors");
    auto data = write_prices(dir);
    const std::string base = "--data " + data.string() + " --train-len 60 --test-len 40 --iterations 5";

    CHECK(run("train " + base + " --target nope --out " + (dir / "bad_col").string(), dir / "log") == 2);
    CHECK(slurp(dir / "log").find("nope") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "bad_col"));

    CHECK(run("train " + base + " --target a --cond b --model uwn --out " + (dir / "uwn_cond").string(),
              dir / "log") == 1);
    CHECK_FALSE(fs::exists(dir / "uwn_cond"));
    CHECK(run("train " + base + " --target a --model cwn --out " + (dir / "cwn_nocond").string(), dir / "log") == 1);
    CHECK(run("train --data /nonexistent.csv --target a --out " + (dir / "missing").string(), dir / "log") == 2);
    CHECK(run("train " + base + " --target a --train-len 5000 --out " + (dir / "short").string(), dir / "log") == 1);
    CHECK(run("train " + base + " --target a --lr -1 --out " + (dir / "lr").string(), dir / "log") == 1);

    // evaluate against checkpoints trained with a different architecture
    REQUIRE(run("train " + base + " --target a --seeds 1 --seed-pool 1 --out " + (dir / "run").string(),
                dir / "log") == 0);
    CHECK(run("evaluate " + base + " --target a --layers 3 --out " + (dir / "run").string(), dir / "log") == 2);
    CHECK(slurp(dir / "log").find("layers") != std::string::npos);
}

TEST_CASE("identical runs produce identical files")
{
    auto dir = scratch("cli_determinism");
    auto data = write_prices(dir);
    for (const char* name : {"one", "two"}) {
        const std::string args = "--data " + data.string() +
                                 " --target a --cond b --returns --model cwn --train-len 60 --test-len 40" +
                                 " --iterations 40 --seeds 2 --seed-pool 3 --jobs 2 --out " + (dir / name).string();
        REQUIRE(run("train " + args, dir / "log") == 0);
        REQUIRE(run("evaluate " + args, dir / "log") == 0);
    }
    CHECK(slurp(dir / "one" / "metrics" / "metrics.csv") == slurp(dir / "two" / "metrics" / "metrics.csv"));
    CHECK(slurp(dir / "one" / "checkpoints" / "split1_net1.json") ==
          slurp(dir / "two" / "checkpoints" / "split1_net1.json"));
}
