// Batch front end: describe, flops, train, extract, verify, identify,
// gradcheck. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numeric/validation failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vfn/dataio/dataset.hpp"
#include "vfn/dataio/image.hpp"
#include "vfn/dataio/manifest.hpp"
#include "vfn/eval/features.hpp"
#include "vfn/eval/identification.hpp"
#include "vfn/eval/report.hpp"
#include "vfn/eval/verification.hpp"
#include "vfn/fdcheck.hpp"
#include "vfn/graph/builtins.hpp"
#include "vfn/graph/flops.hpp"
#include "vfn/graph/model_io.hpp"
#include "vfn/graph/network.hpp"
#include "vfn/runtime.hpp"
#include "vfn/train/augment.hpp"
#include "vfn/train/init.hpp"
#include "vfn/train/trainer.hpp"

namespace fs = std::filesystem;

namespace {

struct DescribeArgs {
    std::string model;
    std::string builtin;
};

struct FlopsArgs {
    std::vector<std::string> builtins;
    std::int64_t crop = 227;
};

struct TrainArgs {
    std::string manifest;
    std::string arch;
    std::string out;
    std::string log;
    std::uint64_t seed = 0;
    std::int64_t epochs = 1;
    std::int64_t iters = 0;  // overrides epochs when > 0
    std::int64_t batch = 32;
    double lr = 0.0;  // 0 = pick by architecture (0.04 with fnl, 0.01 without)
    double lr_power = 0.5;
    double momentum = 0.9;
    double weight_decay = 0.0005;
    double flip = 0.5;
};

struct ExtractArgs {
    std::string model;
    std::string manifest;
    std::string out;
};

struct VerifyArgs {
    std::string features;
    std::string pairs;
};

struct IdentifyArgs {
    std::string features;
    std::string gallery;
    std::string probes;
    double far = 0.01;
};

struct GradcheckArgs {
    std::uint64_t seed = 1234;
    bool negate_fnl = false;
};

// --arch accepts a builtin name or a descriptor file path
vfn::graph::NetworkDescriptor resolve_arch(const std::string& arch) {
    for (const auto& name : vfn::graph::builtin_names()) {
        if (arch == name) return vfn::graph::builtin(arch);
    }
    if (!fs::exists(arch)) {
        throw vfn::UsageError("--arch '" + arch +
                              "' is neither a builtin name nor a descriptor file");
    }
    return vfn::graph::parse_descriptor(vfn::dataio::read_text_file(arch));
}

bool descriptor_uses_fnl(const vfn::graph::NetworkDescriptor& d) {
    using vfn::graph::LayerKind;
    for (const auto& l : d.layers) {
        if (l.kind == LayerKind::fnl) return true;
        if (l.kind == LayerKind::conv &&
            std::get<vfn::graph::ConvDef>(l.params).norm == vfn::graph::NormKind::fnl)
            return true;
        if (l.kind == LayerKind::fc &&
            std::get<vfn::graph::FcDef>(l.params).norm == vfn::graph::NormKind::fnl)
            return true;
    }
    return false;
}

int cmd_describe(const DescribeArgs& args) {
    if (args.model.empty() == args.builtin.empty()) {
        throw vfn::UsageError("describe: give exactly one of --model or --builtin");
    }
    vfn::graph::NetworkDescriptor desc;
    if (!args.builtin.empty()) {
        desc = vfn::graph::builtin(args.builtin);
    } else {
        desc = vfn::graph::load_model(args.model).descriptor();
    }
    const auto report = vfn::graph::count_flops(desc, desc.input_shape());
    std::printf("# %-12s %-12s %-16s %s\n", "layer", "kind", "output", "params");
    std::int64_t total_params = 0;
    for (const auto& l : report.layers) {
        std::printf("%-14s %-12s %-16s %lld\n", l.name.c_str(), vfn::graph::kind_name(l.kind),
                    l.out_shape.to_string().c_str(), static_cast<long long>(l.params));
        total_params += l.params;
    }
    std::printf("# total params: %lld\n", static_cast<long long>(total_params));
    return 0;
}

int cmd_flops(const FlopsArgs& args) {
    if (args.builtins.size() != 2) {
        throw vfn::UsageError("flops: give --builtin twice (repeat the name to self-compare)");
    }
    std::vector<std::int64_t> totals;
    for (const auto& name : args.builtins) {
        const auto desc = vfn::graph::builtin(name);
        const vfn::Shape in = desc.input_shape();
        const auto report =
            vfn::graph::count_flops(desc, vfn::Shape{in.dim(0), args.crop, args.crop});
        totals.push_back(report.total_macs);
        std::printf("total %s %lld\n", name.c_str(), static_cast<long long>(report.total_macs));
    }
    std::printf("ratio %.3f\n", static_cast<double>(totals[0]) / static_cast<double>(totals[1]));
    return 0;
}

int cmd_train(const TrainArgs& args) {
    const auto manifest = vfn::dataio::read_manifest(vfn::dataio::read_text_file(args.manifest));
    const std::string base_dir = fs::path(args.manifest).parent_path().string();
    auto dataset = vfn::dataio::load_dataset(manifest, base_dir);

    auto desc = resolve_arch(args.arch);
    vfn::graph::Network net{std::move(desc)};

    const vfn::Tensor mean = vfn::dataio::mean_image(dataset.images, &dataset.paths);
    net.set_input_mean(mean);

    vfn::Rng init_rng(args.seed);
    vfn::train::initialize_network(net, init_rng);

    vfn::train::SolverConfig cfg;
    cfg.base_lr = args.lr > 0.0 ? static_cast<float>(args.lr)
                                : (descriptor_uses_fnl(net.descriptor()) ? 0.04f : 0.01f);
    cfg.lr_power = static_cast<float>(args.lr_power);
    cfg.momentum = static_cast<float>(args.momentum);
    cfg.weight_decay = static_cast<float>(args.weight_decay);
    cfg.batch_size = args.batch;
    cfg.rng_seed = args.seed;
    cfg.flip_prob = static_cast<float>(args.flip);
    const vfn::Shape in_shape = net.descriptor().input_shape();
    if (in_shape.rank() != 3 || in_shape.dim(1) != in_shape.dim(2)) {
        throw vfn::DataError("train: architecture input must be square (C,S,S), got " +
                             in_shape.to_string());
    }
    cfg.crop_size = in_shape.dim(1);
    const auto n = static_cast<std::int64_t>(dataset.images.size());
    cfg.max_iter = args.iters > 0 ? args.iters : args.epochs * ((n + args.batch - 1) / args.batch);

    vfn::train::TrainData data{std::move(dataset.images), std::move(dataset.labels), mean};
    vfn::train::Trainer trainer(net, data, cfg);

    std::optional<std::ofstream> log_file;
    const std::string log_tmp = args.log.empty() ? "" : args.log + ".tmp";
    if (!args.log.empty()) {
        log_file.emplace(log_tmp, std::ios::trunc);
        if (!*log_file) throw vfn::IoError("cannot open '" + log_tmp + "' for writing");
    }
    try {
        trainer.run([&](std::int64_t iter, float lr, float loss) {
            char line[96];
            std::snprintf(line, sizeof(line), "%lld,%.9g,%.9g\n", static_cast<long long>(iter),
                          static_cast<double>(lr), static_cast<double>(loss));
            if (log_file) {
                *log_file << line;
            } else {
                std::fputs(line, stdout);
            }
        });
    } catch (...) {
        if (log_file) {
            log_file->close();
            fs::remove(log_tmp);
        }
        throw;
    }
    if (log_file) {
        log_file->flush();
        if (!*log_file) throw vfn::IoError("failed writing loss log");
        log_file->close();
        fs::rename(log_tmp, args.log);
    }
    vfn::graph::save_model(net, args.out);
    return 0;
}

int cmd_extract(const ExtractArgs& args) {
    auto net = vfn::graph::load_model(args.model);
    const auto entries =
        vfn::dataio::read_labeled_list(vfn::dataio::read_text_file(args.manifest));
    if (entries.empty()) throw vfn::DataError("extract: manifest has no entries");
    const std::string base_dir = fs::path(args.manifest).parent_path().string();
    const vfn::Shape in_shape = net.descriptor().input_shape();
    if (in_shape.rank() != 3) {
        throw vfn::DataError("extract: model input must be (C,H,W), got " + in_shape.to_string());
    }
    const vfn::Tensor empty_mean;
    const vfn::Tensor& mean = net.has_input_mean() ? net.input_mean() : empty_mean;

    std::vector<std::string> names;
    std::vector<std::vector<float>> vectors;
    vfn::Rng unused(0);
    for (const auto& [rel, label] : entries) {
        (void)label;
        const fs::path path = base_dir.empty() ? fs::path(rel) : fs::path(base_dir) / rel;
        vfn::Tensor img = vfn::dataio::read_image_file(path.string());
        if (img.shape().dim(0) != in_shape.dim(0)) {
            throw vfn::DataError(path.string() + ": channel count " +
                                 std::to_string(img.shape().dim(0)) + " does not match model input " +
                                 in_shape.to_string());
        }
        vfn::Tensor prepped = vfn::train::augment(img, mean, in_shape.dim(1), 0.0f,
                                                  vfn::Mode::test, unused);
        names.push_back(rel);
        vectors.push_back(vfn::eval::extract_feature(net, prepped));
    }
    vfn::eval::write_features(args.out, names, vectors);
    return 0;
}

int cmd_verify(const VerifyArgs& args) {
    const auto features = vfn::eval::read_features(args.features);
    const auto folds = vfn::eval::parse_pair_file(vfn::dataio::read_text_file(args.pairs));
    const auto report = vfn::eval::verify_kfold(folds, [&](const std::string& a, const std::string& b) {
        return vfn::eval::cosine(features.lookup(a), features.lookup(b));
    });
    std::fputs(vfn::eval::verification_report(report).c_str(), stdout);
    return 0;
}

int cmd_identify(const IdentifyArgs& args) {
    if (!(args.far > 0.0 && args.far < 1.0)) {
        throw vfn::UsageError("identify: --far must lie in (0,1)");
    }
    const auto features = vfn::eval::read_features(args.features);
    const auto gallery = vfn::dataio::read_labeled_list(vfn::dataio::read_text_file(args.gallery));
    const auto probes = vfn::dataio::read_labeled_list(vfn::dataio::read_text_file(args.probes));
    const auto split = vfn::eval::build_split(gallery, probes, features);
    const double rank1 = vfn::eval::identify_closed(split);
    const auto open = vfn::eval::identify_open(split, args.far);
    std::fputs(vfn::eval::identification_report(rank1, open, args.far).c_str(), stdout);
    return 0;
}

int cmd_gradcheck(const GradcheckArgs& args) {
    const auto checks = vfn::fdcheck::run_all(args.seed, args.negate_fnl);
    bool all_pass = true;
    for (const auto& c : checks) {
        std::printf("%s %-12s max_rel_err=%.3e (tol %.1e)\n", c.pass ? "PASS" : "FAIL",
                    c.op.c_str(), c.max_rel_err, c.tolerance);
        all_pass = all_pass && c.pass;
    }
    return all_pass ? 0 : 3;
}

int run(int argc, char** argv) {
    CLI::App app{"face representation micro-runtime"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    int threads = 1;
    app.add_option("--threads", threads, "worker threads for the matrix kernels")
        ->check(CLI::PositiveNumber);

    DescribeArgs describe_args;
    auto* describe = app.add_subcommand("describe", "per-layer shape and parameter table");
    describe->add_option("--model", describe_args.model, "model file");
    describe->add_option("--builtin", describe_args.builtin, "builtin architecture name");

    FlopsArgs flops_args;
    auto* flops = app.add_subcommand("flops", "multiply-accumulate totals and ratio of two nets");
    flops->add_option("--builtin", flops_args.builtins, "builtin name (give twice)");
    flops->add_option("--crop", flops_args.crop, "input side length")->check(CLI::PositiveNumber);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "SGD training run");
    train->add_option("--manifest", train_args.manifest, "path,label manifest")->required();
    train->add_option("--arch", train_args.arch, "builtin name or descriptor file")->required();
    train->add_option("--out", train_args.out, "output model file")->required();
    train->add_option("--log", train_args.log, "loss log file (default: stdout)");
    train->add_option("--seed", train_args.seed, "rng seed");
    train->add_option("--epochs", train_args.epochs, "training epochs")->check(CLI::PositiveNumber);
    train->add_option("--iters", train_args.iters, "iteration count (overrides --epochs)");
    train->add_option("--batch", train_args.batch, "batch size")->check(CLI::PositiveNumber);
    train->add_option("--lr", train_args.lr, "base learning rate (default 0.04 with fnl, else 0.01)");
    train->add_option("--lr-power", train_args.lr_power, "polynomial decay exponent");
    train->add_option("--momentum", train_args.momentum, "momentum");
    train->add_option("--wd", train_args.weight_decay, "weight decay");
    train->add_option("--flip", train_args.flip, "horizontal flip probability");

    ExtractArgs extract_args;
    auto* extract = app.add_subcommand("extract", "write features for every manifest entry");
    extract->add_option("--model", extract_args.model, "model file")->required();
    extract->add_option("--manifest", extract_args.manifest, "path,label manifest")->required();
    extract->add_option("--out", extract_args.out, "output feature file")->required();

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "k-fold pair verification report");
    verify->add_option("--features", verify_args.features, "feature file")->required();
    verify->add_option("--pairs", verify_args.pairs, "pair-fold file")->required();

    IdentifyArgs identify_args;
    auto* identify = app.add_subcommand("identify", "closed/open-set identification report");
    identify->add_option("--features", identify_args.features, "feature file")->required();
    identify->add_option("--gallery", identify_args.gallery, "gallery name,identity file")->required();
    identify->add_option("--probes", identify_args.probes, "probe name,identity file")->required();
    identify->add_option("--far", identify_args.far, "false-alarm rate in (0,1)");

    GradcheckArgs gradcheck_args;
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every backward op");
    gradcheck->add_option("--seed", gradcheck_args.seed, "rng seed");
    gradcheck->add_flag("--negate-fnl", gradcheck_args.negate_fnl,
                        "inject a sign fault into the fnl gradient (harness self-test)")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    vfn::runtime::set_threads(threads);
    if (describe->parsed()) return cmd_describe(describe_args);
    if (flops->parsed()) return cmd_flops(flops_args);
    if (train->parsed()) return cmd_train(train_args);
    if (extract->parsed()) return cmd_extract(extract_args);
    if (verify->parsed()) return cmd_verify(verify_args);
    if (identify->parsed()) return cmd_identify(identify_args);
    if (gradcheck->parsed()) return cmd_gradcheck(gradcheck_args);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const vfn::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const vfn::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const vfn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
