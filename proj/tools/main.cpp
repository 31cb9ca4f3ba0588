#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "suprb/cli.hpp"
#include "suprb/config.hpp"

int main(int argc, char** argv)
{
    using namespace suprb::cli;

    CLI::App app{"suprb: rule-based regression with separate rule discovery and rule-set composition"};
    app.require_subcommand(1);
    app.footer("Config keys (JSON file, or --set key=value; flags > file > defaults):\n" + suprb::describe_config_keys());

    const std::map<std::string, Format> formats{{"text", Format::text}, {"machine", Format::machine}};

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "train a model on a CSV file and write it as JSON");
    fit_cmd->add_option("data", fit.data_path, "training CSV (header row, numeric cells)")->required();
    fit_cmd->add_option("--target", fit.target, "target column name (default: last column)");
    fit_cmd->add_option("--config", fit.config_files, "JSON config file(s), applied in order");
    fit_cmd->add_option("--set", fit.overrides, "override a config key, e.g. learner.es.lambda=10");
    fit_cmd->add_option("--seed", fit.seed, "learner master seed");
    fit_cmd->add_option("--jobs", fit.jobs, "threads for rule discovery");
    fit_cmd->add_option("--out", fit.model_out, "model output path")->capture_default_str();
    fit_cmd->add_option("--format", fit.format, "output format")->transform(CLI::CheckedTransformer(formats));

    PredictOptions pred;
    auto* pred_cmd = app.add_subcommand("predict", "write original-unit predictions as CSV");
    pred_cmd->add_option("model", pred.model_path, "model JSON file")->required();
    pred_cmd->add_option("data", pred.data_path, "CSV with the model's feature columns")->required();
    pred_cmd->add_option("--out", pred.out_path, "output CSV (default: stdout)");

    InspectOptions insp;
    std::string rule_arg;
    auto* insp_cmd = app.add_subcommand("inspect", "print rules with intervals in original and scaled space");
    insp_cmd->add_option("model", insp.model_path, "model JSON file")->required();
    insp_cmd->add_option("--rule", rule_arg, "pool index of one rule, or 'all' for the whole pool");
    insp_cmd->add_option("--format", insp.format, "output format")->transform(CLI::CheckedTransformer(formats));

    BenchmarkOptions bench;
    auto* bench_cmd = app.add_subcommand("benchmark", "repeated Monte Carlo cross-validation over a dataset registry");
    bench_cmd->add_option("registry", bench.registry_path, "JSON registry listing datasets")->required();
    bench_cmd->add_option("--out", bench.out_dir, "output directory")->capture_default_str();
    bench_cmd->add_option("--config", bench.config_files, "JSON config file(s), applied before the registry");
    bench_cmd->add_option("--set", bench.overrides, "override a config key");
    bench_cmd->add_option("--seed", bench.seed, "benchmark master seed");
    bench_cmd->add_option("--jobs", bench.jobs, "parallel runs (results do not depend on it)");
    bench_cmd->add_option("--format", bench.format, "stdout format")->transform(CLI::CheckedTransformer(formats));

    GenerateOptions gen;
    auto* gen_cmd = app.add_subcommand("generate", "write a synthetic 1-D piecewise-linear dataset as CSV");
    gen_cmd->add_option("--n", gen.n, "number of examples")->capture_default_str();
    gen_cmd->add_option("--segments", gen.segments, "linear pieces")->capture_default_str();
    gen_cmd->add_option("--noise", gen.noise_std, "Gaussian noise std")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
    gen_cmd->add_option("--out", gen.out_path, "output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    if (*fit_cmd) return cmd_fit(fit, std::cout, std::cerr);
    if (*pred_cmd) return cmd_predict(pred, std::cout, std::cerr);
    if (*insp_cmd) {
        if (rule_arg == "all") {
            insp.whole_pool = true;
        } else if (!rule_arg.empty()) {
            try {
                insp.rule = std::stoull(rule_arg);
            } catch (const std::exception&) {
                std::cerr << "invalid argument: --rule expects an index or 'all'\n";
                return kConfigError;
            }
        }
        return cmd_inspect(insp, std::cout, std::cerr);
    }
    if (*bench_cmd) return cmd_benchmark(bench, std::cout, std::cerr);
    if (*gen_cmd) return cmd_generate(gen, std::cout, std::cerr);
    return kConfigError;
}
