// Command-line front end for the double-spend detection pipeline.
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsd/gnn.hpp"
#include "dsd/observation.hpp"
#include "dsd/pipeline.hpp"
#include "dsd/propagation.hpp"
#include "dsd/rng.hpp"
#include "dsd/topology.hpp"

namespace {

// Every artifact gets a sibling <out>.config with the fully resolved options,
// so any output can be regenerated from its config alone.
void write_config(const std::string& out_path,
                  const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream cfg(out_path + ".config");
    for (const auto& [k, v] : kv) cfg << k << '=' << v << '\n';
}

std::string dstr(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

struct HyperFlags {
    dsd::Hyperparams hp;
    void attach(CLI::App* cmd) {
        cmd->add_option("--hidden", hp.d_h, "Hidden width of the GNN layers");
        cmd->add_option("--dropout", hp.dropout_p, "Dropout probability after each ReLU");
        cmd->add_option("--lr", hp.lr, "Adam learning rate");
        cmd->add_option("--epochs", hp.epochs, "Epoch budget");
        cmd->add_option("--batch", hp.batch_size, "Mini-batch size (graphs)");
        cmd->add_option("--patience", hp.early_stop_patience,
                        "Early-stop patience in epochs without loss improvement");
        cmd->add_flag("--scale-features,!--raw-features", hp.scale_features_by_degree,
                      "Scale feature rows to per-hop fractions (default) or keep raw counts");
    }
    std::vector<std::pair<std::string, std::string>> config() const {
        return {{"hidden", std::to_string(hp.d_h)},
                {"dropout", dstr(hp.dropout_p)},
                {"lr", dstr(hp.lr)},
                {"epochs", std::to_string(hp.epochs)},
                {"batch", std::to_string(hp.batch_size)},
                {"patience", std::to_string(hp.early_stop_patience)},
                {"scale_features", hp.scale_features_by_degree ? "1" : "0"}};
    }
};

std::vector<dsd::GraphSample> load_dataset_file(const std::string& path,
                                                dsd::DatasetSpec* spec, int threads) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    return dsd::read_dataset(in, spec, threads);
}

struct ParsedMetrics {
    std::string layer;
    int observers = 0;
    std::map<std::string, std::string> values; // accuracy, precision, recall, f1, cv_mean
};

ParsedMetrics parse_metrics_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metrics file: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "dsd-metrics" || version != 1)
        throw std::runtime_error("bad metrics file: " + path);
    ParsedMetrics m;
    std::string key;
    while (in >> key) {
        std::string val;
        if (key == "layer") in >> m.layer;
        else if (key == "observers") in >> m.observers;
        else if (key == "confusion") { std::string rest; std::getline(in, rest); }
        else if (key == "cv_fold") { int i; in >> i >> val; }
        else if (in >> val) m.values[key] = val;
    }
    return m;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Double-spend detection over simulated Bitcoin gossip"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")
        ->capture_default_str();

    // gen-topology
    auto* gen = app.add_subcommand("gen-topology", "Generate a Barabasi-Albert topology");
    int g_n = 14000, g_m = 8;
    std::uint64_t g_seed = 1;
    std::string g_out = "topology.txt";
    gen->add_option("-n,--nodes", g_n, "Node count")->capture_default_str();
    gen->add_option("-m,--ba-m", g_m, "Attachment edges per new node")->capture_default_str();
    gen->add_option("--seed", g_seed, "Generator seed")->capture_default_str();
    gen->add_option("-o,--out", g_out, "Output topology file")->capture_default_str();

    // build-dataset
    auto* bd = app.add_subcommand("build-dataset", "Simulate propagation and build samples");
    dsd::DatasetSpec spec;
    std::string bd_out = "dataset.txt";
    bd->add_option("-n,--nodes", spec.n, "Node count")->capture_default_str();
    bd->add_option("-k,--observers", spec.observer_count, "Observer count")
        ->capture_default_str();
    bd->add_option("--samples", spec.total_samples, "Total samples")->capture_default_str();
    bd->add_option("--positive-fraction", spec.positive_fraction,
                   "Fraction of no-attack samples")
        ->capture_default_str();
    bd->add_option("--ba-m", spec.ba_m, "BA attachment count")->capture_default_str();
    bd->add_option("--latency-mean", spec.latency_mean, "Mean per-hop delay")
        ->capture_default_str();
    std::string bd_latency_model = "uniform";
    bd->add_option("--latency-model", bd_latency_model,
                   "Per-hop delay law: uniform (jitter in [0.5,1.5]*mean) | exp")
        ->check(CLI::IsMember({"uniform", "exp"}))
        ->capture_default_str();
    bd->add_option("--delay-max", spec.attack_delay_max,
                   "Attack injection delay upper bound (<=0: auto, half the mean latency)")
        ->capture_default_str();
    bd->add_flag("--shared-topology", spec.shared_topology,
                 "Reuse one topology for every sample");
    bd->add_option("--seed", spec.master_seed, "Master seed")->capture_default_str();
    bd->add_option("-o,--out", bd_out, "Output dataset file")->capture_default_str();

    // train
    auto* tr = app.add_subcommand("train", "Train a model on the dataset's train split");
    std::string tr_data, tr_layer = "gcn", tr_out = "model.ckpt", tr_loss = "";
    std::uint64_t tr_seed = 1, tr_split_seed = 0;
    double tr_frac = 0.7;
    HyperFlags tr_hp;
    tr->add_option("--data", tr_data, "Dataset file")->required();
    tr->add_option("--layer", tr_layer, "GNN layer kind: gcn | sage | gat")
        ->capture_default_str();
    tr->add_option("--seed", tr_seed, "Training seed")->capture_default_str();
    tr->add_option("--train-fraction", tr_frac, "Train split fraction")->capture_default_str();
    tr->add_option("--split-seed", tr_split_seed, "Split seed (0: dataset master seed)")
        ->capture_default_str();
    tr->add_option("-o,--out", tr_out, "Checkpoint path")->capture_default_str();
    tr->add_option("--loss-out", tr_loss, "Per-epoch loss curve CSV (default <out>.loss.csv)");
    tr_hp.attach(tr);

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Evaluate a checkpoint on the test split");
    std::string ev_data, ev_model, ev_out = "metrics.txt";
    std::uint64_t ev_split_seed = 0, ev_seed = 1;
    double ev_frac = 0.7;
    int ev_cv = 0;
    HyperFlags ev_hp;
    ev->add_option("--data", ev_data, "Dataset file")->required();
    ev->add_option("--model", ev_model, "Checkpoint path")->required();
    ev->add_option("--train-fraction", ev_frac, "Train split fraction")->capture_default_str();
    ev->add_option("--split-seed", ev_split_seed, "Split seed (0: dataset master seed)")
        ->capture_default_str();
    ev->add_option("--cv-folds", ev_cv, "Also run k-fold CV on the train split (0: off)")
        ->capture_default_str();
    ev->add_option("--seed", ev_seed, "CV training seed")->capture_default_str();
    ev->add_option("-o,--out", ev_out, "Metrics report path")->capture_default_str();
    ev_hp.attach(ev);

    // grad-check
    auto* gc = app.add_subcommand("grad-check", "Finite-difference check of model gradients");
    std::string gc_layer = "gcn";
    std::uint64_t gc_seed = 1;
    int gc_nodes = 6, gc_hidden = 8;
    double gc_h = 1e-5;
    gc->add_option("--layer", gc_layer, "GNN layer kind: gcn | sage | gat")
        ->capture_default_str();
    gc->add_option("--seed", gc_seed, "Seed")->capture_default_str();
    gc->add_option("--nodes", gc_nodes, "Test graph size")->capture_default_str();
    gc->add_option("--hidden", gc_hidden, "Hidden width")->capture_default_str();
    gc->add_option("--step", gc_h, "Finite-difference step")->capture_default_str();

    // report
    auto* rp = app.add_subcommand("report", "Render a comparison table from metrics files");
    std::vector<std::string> rp_files;
    std::string rp_out = "report.txt";
    rp->add_option("files", rp_files, "Metrics report files")->required();
    rp->add_option("-o,--out", rp_out, "Rendered table path")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            dsd::Topology t = dsd::generate_ba(g_n, g_m, g_seed);
            std::ofstream out(g_out);
            dsd::write_topology(out, t);
            write_config(g_out, {{"command", "gen-topology"},
                                 {"nodes", std::to_string(g_n)},
                                 {"ba_m", std::to_string(g_m)},
                                 {"seed", std::to_string(g_seed)},
                                 {"out", g_out}});
            std::cout << "wrote " << g_out << " (" << t.edge_count() << " edges)\n";
        } else if (*bd) {
            spec.latency_model = bd_latency_model == "exp" ? dsd::LatencyModel::Exponential
                                                           : dsd::LatencyModel::UniformJitter;
            auto samples = dsd::build_dataset(spec, threads);
            std::ofstream out(bd_out);
            dsd::write_dataset(out, spec, samples);
            write_config(bd_out, {{"command", "build-dataset"},
                                  {"nodes", std::to_string(spec.n)},
                                  {"observers", std::to_string(spec.observer_count)},
                                  {"samples", std::to_string(spec.total_samples)},
                                  {"positive_fraction", dstr(spec.positive_fraction)},
                                  {"ba_m", std::to_string(spec.ba_m)},
                                  {"latency_mean", dstr(spec.latency_mean)},
                                  {"delay_max", dstr(spec.attack_delay_max)},
                                  {"shared_topology", spec.shared_topology ? "1" : "0"},
                                  {"seed", std::to_string(spec.master_seed)},
                                  {"threads", std::to_string(threads)},
                                  {"out", bd_out}});
            std::cout << "wrote " << bd_out << " (" << samples.size() << " samples)\n";
        } else if (*tr) {
            dsd::DatasetSpec dspec;
            auto samples = load_dataset_file(tr_data, &dspec, threads);
            const std::uint64_t split_seed =
                tr_split_seed ? tr_split_seed : dspec.master_seed;
            std::vector<const dsd::GraphSample*> train, test;
            dsd::split_dataset(samples, tr_frac, split_seed, train, test);
            dsd::TrainResult res = dsd::train_model(
                train, dsd::layer_kind_from_name(tr_layer), tr_hp.hp, tr_seed, threads);
            {
                std::ofstream out(tr_out);
                dsd::save_model(out, res.model);
            }
            const std::string loss_path = tr_loss.empty() ? tr_out + ".loss.csv" : tr_loss;
            {
                std::ofstream out(loss_path);
                out << "epoch,mean_train_loss\n";
                for (std::size_t e = 0; e < res.loss_curve.size(); ++e)
                    out << e << ',' << std::setprecision(17) << res.loss_curve[e] << '\n';
            }
            auto cfg = tr_hp.config();
            cfg.insert(cfg.begin(), {{"command", "train"},
                                     {"data", tr_data},
                                     {"layer", tr_layer},
                                     {"seed", std::to_string(tr_seed)},
                                     {"train_fraction", dstr(tr_frac)},
                                     {"split_seed", std::to_string(split_seed)},
                                     {"threads", std::to_string(threads)},
                                     {"loss_out", loss_path},
                                     {"out", tr_out}});
            write_config(tr_out, cfg);
            std::cout << "wrote " << tr_out << " after " << res.loss_curve.size()
                      << " epochs (final loss "
                      << (res.loss_curve.empty() ? 0.0 : res.loss_curve.back()) << ")\n";
        } else if (*ev) {
            dsd::DatasetSpec dspec;
            auto samples = load_dataset_file(ev_data, &dspec, threads);
            const std::uint64_t split_seed =
                ev_split_seed ? ev_split_seed : dspec.master_seed;
            std::vector<const dsd::GraphSample*> train, test;
            dsd::split_dataset(samples, ev_frac, split_seed, train, test);
            dsd::ModelParams model;
            {
                std::ifstream in(ev_model);
                if (!in) throw std::runtime_error("cannot open model file: " + ev_model);
                model = dsd::load_model(in);
            }
            dsd::EvalMetrics m =
                dsd::evaluate(model, test, ev_hp.hp.scale_features_by_degree, threads);
            dsd::CvResult cv;
            bool have_cv = false;
            if (ev_cv > 0) {
                dsd::Hyperparams hp = ev_hp.hp;
                hp.d_h = model.cfg.d_h;
                hp.dropout_p = model.cfg.dropout_p;
                cv = dsd::kfold_cv(train, ev_cv, model.cfg.kind, hp, ev_seed, threads);
                have_cv = true;
            }
            {
                std::ofstream out(ev_out);
                dsd::write_metrics_report(out, dsd::layer_kind_name(model.cfg.kind),
                                          dspec.observer_count, m,
                                          have_cv ? &cv : nullptr);
            }
            auto cfg = ev_hp.config();
            cfg.insert(cfg.begin(), {{"command", "evaluate"},
                                     {"data", ev_data},
                                     {"model", ev_model},
                                     {"train_fraction", dstr(ev_frac)},
                                     {"split_seed", std::to_string(split_seed)},
                                     {"cv_folds", std::to_string(ev_cv)},
                                     {"seed", std::to_string(ev_seed)},
                                     {"threads", std::to_string(threads)},
                                     {"out", ev_out}});
            write_config(ev_out, cfg);
            std::cout << "accuracy " << m.accuracy << ", wrote " << ev_out << '\n';
        } else if (*gc) {
            dsd::Topology t = dsd::generate_ba(gc_nodes, std::max(1, gc_nodes / 3), gc_seed);
            dsd::GnnConfig cfg;
            cfg.kind = dsd::layer_kind_from_name(gc_layer);
            cfg.d_h = gc_hidden;
            cfg.dropout_p = 0.0;
            dsd::ModelParams p = dsd::init_params(cfg, dsd::derive_seed(gc_seed, 21));
            dsd::Mat X(gc_nodes, cfg.d_in);
            dsd::Rng rng(dsd::derive_seed(gc_seed, 22));
            for (double& x : X.a) x = 2.0 * rng.next_unit() - 1.0;
            const double err = dsd::grad_check(p, t, X, 1, gc_h, gc_seed);
            std::cout << "max relative gradient error (" << gc_layer << "): " << err << '\n';
            return err < 1e-4 ? 0 : 1;
        } else if (*rp) {
            std::vector<ParsedMetrics> all;
            for (const auto& f : rp_files) all.push_back(parse_metrics_file(f));
            std::vector<int> obs_counts;
            std::vector<std::string> layers;
            for (const auto& m : all) {
                if (std::find(obs_counts.begin(), obs_counts.end(), m.observers) ==
                    obs_counts.end())
                    obs_counts.push_back(m.observers);
                if (std::find(layers.begin(), layers.end(), m.layer) == layers.end())
                    layers.push_back(m.layer);
            }
            std::sort(obs_counts.begin(), obs_counts.end());
            auto cell = [&](int obs, const std::string& layer,
                            const std::string& key) -> std::string {
                for (const auto& m : all)
                    if (m.observers == obs && m.layer == layer) {
                        auto it = m.values.find(key);
                        return it == m.values.end() ? "-" : it->second;
                    }
                return "-";
            };
            std::ostringstream table;
            table << std::left << std::setw(18) << "Observer Nodes";
            for (int obs : obs_counts)
                for (const auto& l : layers)
                    table << std::setw(12) << obs;
            table << '\n' << std::setw(18) << "GNN Layer";
            for (int obs : obs_counts) {
                (void)obs;
                for (const auto& l : layers) table << std::setw(12) << l;
            }
            table << '\n';
            const std::pair<std::string, std::string> rows[] = {
                {"CV Avg. Accuracy", "cv_mean"}, {"Test Accuracy", "accuracy"},
                {"Precision", "precision"},      {"Recall", "recall"},
                {"F1-score", "f1"}};
            for (const auto& [title, key] : rows) {
                table << std::setw(18) << title;
                for (int obs : obs_counts)
                    for (const auto& l : layers) table << std::setw(12) << cell(obs, l, key);
                table << '\n';
            }
            std::ofstream out(rp_out);
            out << table.str();
            std::cout << table.str();
            write_config(rp_out, {{"command", "report"}, {"out", rp_out}});
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
