#include "dsd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dsd/rng.hpp"

namespace dsd {

namespace {

int resolve_threads(int threads) {
#ifdef _OPENMP
    return threads > 0 ? threads : omp_get_max_threads();
#else
    (void)threads;
    return 1;
#endif
}

GraphSample make_sample(const DatasetSpec& spec, int index, bool positive,
                        double delay_max, const Topology* shared) {
    GraphSample s;
    s.sample_seed = derive_seed(spec.master_seed, 1000 + static_cast<std::uint64_t>(index));
    if (shared) {
        s.topology = *shared;
    } else {
        s.topology = generate_ba(spec.n, spec.ba_m, derive_seed(s.sample_seed, 1));
    }

    Rng rng(derive_seed(s.sample_seed, 2));
    ScenarioParams sp;
    sp.latency_mean = spec.latency_mean;
    sp.latency_model = spec.latency_model;
    sp.seed = derive_seed(s.sample_seed, 3);
    sp.pay_origin = static_cast<int>(rng.next_below(spec.n));
    if (positive) {
        sp.scenario = Scenario::NoAttack;
    } else {
        sp.scenario = Scenario::Attack;
        do {
            sp.attack_origin = static_cast<int>(rng.next_below(spec.n));
        } while (sp.attack_origin == sp.pay_origin);
        sp.attack_delay = rng.next_unit() * delay_max;
    }

    PropagationOutcome out = run_propagation(s.topology, sp);
    s.graph_label = out.graph_label;
    s.pay_holder_count = out.pay_holder_count;
    s.observers = select_observers(spec.n, spec.observer_count, derive_seed(s.sample_seed, 4));
    s.labels = assign_labels(out, s.observers);
    s.features = extract_features(s.topology, s.labels, 1);
    return s;
}

} // namespace

std::vector<GraphSample> build_dataset(const DatasetSpec& spec, int threads) {
    if (spec.total_samples < 2)
        throw std::invalid_argument("build_dataset: total_samples must be >= 2");
    if (spec.positive_fraction <= 0.0 || spec.positive_fraction >= 1.0)
        throw std::invalid_argument("build_dataset: positive_fraction must be in (0,1)");
    if (spec.observer_count > spec.n)
        throw std::invalid_argument("build_dataset: observer_count > n");

    double delay_max = spec.attack_delay_max;
    Topology shared;
    const Topology* shared_ptr = nullptr;
    if (spec.shared_topology) {
        shared = generate_ba(spec.n, spec.ba_m, derive_seed(spec.master_seed, 7));
        shared_ptr = &shared;
    }
    if (delay_max <= 0.0) delay_max = 0.5 * spec.latency_mean;

    const int pos_count =
        static_cast<int>(std::llround(spec.total_samples * spec.positive_fraction));
    std::vector<GraphSample> samples(spec.total_samples);
    const int nthreads = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#else
    (void)nthreads;
#endif
    for (int i = 0; i < spec.total_samples; ++i)
        samples[i] = make_sample(spec, i, i < pos_count, delay_max, shared_ptr);
    return samples;
}

void split_dataset(const std::vector<GraphSample>& samples, double train_fraction,
                   std::uint64_t seed, std::vector<const GraphSample*>& train,
                   std::vector<const GraphSample*>& test) {
    if (samples.empty()) throw std::invalid_argument("split_dataset: empty sample list");
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("split_dataset: train_fraction must be in (0,1)");

    std::vector<int> cls[2];
    for (std::size_t i = 0; i < samples.size(); ++i)
        cls[samples[i].graph_label == GraphLabel::NoAttackAllHavePay ? 1 : 0].push_back(
            static_cast<int>(i));

    const long target =
        std::lround(train_fraction * static_cast<double>(samples.size()));
    // proportional per-class allocation, largest remainder
    double exact[2] = {train_fraction * cls[0].size(), train_fraction * cls[1].size()};
    long take[2] = {static_cast<long>(exact[0]), static_cast<long>(exact[1])};
    while (take[0] + take[1] < target) {
        const int c = (exact[0] - take[0] >= exact[1] - take[1] && take[0] < (long)cls[0].size())
                          ? 0
                          : 1;
        ++take[c];
    }
    while (take[0] + take[1] > target) --take[take[0] > 0 ? 0 : 1];

    train.clear();
    test.clear();
    for (int c = 0; c < 2; ++c) {
        Rng rng(derive_seed(seed, 0x50 + c));
        auto& idx = cls[c];
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.next_below(i)]);
        for (std::size_t i = 0; i < idx.size(); ++i)
            (static_cast<long>(i) < take[c] ? train : test).push_back(&samples[idx[i]]);
    }
}

Mat feature_input(const GraphSample& s, bool scale_by_degree) {
    const int n = s.features.rows;
    Mat X(n, kFeatureDim);
    for (int v = 0; v < n; ++v) {
        for (int c = 0; c < kFeatureDim; ++c)
            X(v, c) = static_cast<double>(s.features.at(v, c));
        if (scale_by_degree) {
            double hop1 = X(v, 0) + X(v, 1) + X(v, 2);
            double hop2 = 0.0;
            for (int c = 3; c < kFeatureDim; ++c) hop2 += X(v, c);
            if (hop1 > 0.0)
                for (int c = 0; c < 3; ++c) X(v, c) /= hop1;
            if (hop2 > 0.0)
                for (int c = 3; c < kFeatureDim; ++c) X(v, c) /= hop2;
        }
    }
    return X;
}

TrainResult train_model(const std::vector<const GraphSample*>& train, LayerKind kind,
                        const Hyperparams& hp, std::uint64_t seed, int threads) {
    if (train.empty()) throw std::invalid_argument("train_model: empty training set");

    GnnConfig cfg;
    cfg.kind = kind;
    cfg.d_h = hp.d_h;
    cfg.dropout_p = hp.dropout_p;

    TrainResult res;
    res.model = init_params(cfg, derive_seed(seed, 0x11));
    AdamState adam = make_adam_state(res.model, hp.lr, hp.beta1, hp.beta2, hp.eps);

    const int nsamples = static_cast<int>(train.size());
    std::vector<Mat> inputs(nsamples);
    const int nthreads = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (int i = 0; i < nsamples; ++i)
        inputs[i] = feature_input(*train[i], hp.scale_features_by_degree);

    std::vector<int> order(nsamples);
    std::iota(order.begin(), order.end(), 0);

    double best_loss = std::numeric_limits<double>::infinity();
    int stale = 0;
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(seed, 0x100 + static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);

        double epoch_loss = 0.0;
        for (int start = 0; start < nsamples; start += hp.batch_size) {
            const int end = std::min(nsamples, start + hp.batch_size);
            const int bsz = end - start;
            std::vector<ModelParams> item_grads(bsz);
            std::vector<double> item_loss(bsz);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
            for (int b = 0; b < bsz; ++b) {
                const int i = order[start + b];
                const std::uint64_t drop_seed = derive_seed(
                    seed, 0x100000 + static_cast<std::uint64_t>(epoch) * 0x10000 +
                              static_cast<std::uint64_t>(i));
                item_grads[b] = zeros_like(res.model);
                const int label =
                    train[i]->graph_label == GraphLabel::NoAttackAllHavePay ? 1 : 0;
                item_loss[b] = model_eval(res.model, train[i]->topology, inputs[i], label,
                                          drop_seed, true, &item_grads[b])
                                   .loss;
            }
            // order-fixed reduction keeps results identical for any thread count
            ModelParams grads = zeros_like(res.model);
            for (int b = 0; b < bsz; ++b)
                for (std::size_t k = 0; k < grads.blocks.size(); ++k)
                    for (std::size_t x = 0; x < grads.blocks[k].a.size(); ++x)
                        grads.blocks[k].a[x] += item_grads[b].blocks[k].a[x] / bsz;
            adam_step(res.model, grads, adam);
            for (int b = 0; b < bsz; ++b) epoch_loss += item_loss[b];
        }
        epoch_loss /= nsamples;
        res.loss_curve.push_back(epoch_loss);

        if (!std::isfinite(epoch_loss) || !all_finite(res.model)) {
            std::ostringstream msg;
            msg << "train_model: non-finite loss at epoch " << epoch << " (lr=" << hp.lr
                << ", d_h=" << hp.d_h << "); lower the learning rate or reinitialize";
            throw std::runtime_error(msg.str());
        }
        if (epoch_loss < best_loss - 1e-6) {
            best_loss = epoch_loss;
            stale = 0;
        } else if (++stale >= hp.early_stop_patience) {
            break;
        }
    }
    return res;
}

GraphLabel predict(const ModelParams& model, const GraphSample& s, bool scale_features) {
    const Mat X = feature_input(s, scale_features);
    const auto logits = predict_logits(model, s.topology, X);
    // tie -> AttackPresent: the fail-safe answer for a payment-risk check
    return logits[1] > logits[0] ? GraphLabel::NoAttackAllHavePay : GraphLabel::AttackPresent;
}

EvalMetrics evaluate(const ModelParams& model, const std::vector<const GraphSample*>& test,
                     bool scale_features, int threads) {
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    const int n = static_cast<int>(test.size());
    std::vector<std::uint8_t> predicted_pos(n);
    const int nthreads = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
    for (int i = 0; i < n; ++i)
        predicted_pos[i] =
            predict(model, *test[i], scale_features) == GraphLabel::NoAttackAllHavePay;

    long tp = 0, fp = 0, fn = 0, tn = 0;
    for (int i = 0; i < n; ++i) {
        const bool actual_pos = test[i]->graph_label == GraphLabel::NoAttackAllHavePay;
        if (actual_pos && predicted_pos[i]) ++tp;
        else if (!actual_pos && predicted_pos[i]) ++fp;
        else if (actual_pos && !predicted_pos[i]) ++fn;
        else ++tn;
    }
    return metrics_from_confusion(tp, fp, fn, tn);
}

EvalMetrics metrics_from_confusion(long tp, long fp, long fn, long tn) {
    EvalMetrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    const long total = tp + fp + fn + tn;
    m.accuracy = total ? static_cast<double>(tp + tn) / total : 0.0;
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / (tp + fp);
    if (tp + fn > 0) m.recall = static_cast<double>(tp) / (tp + fn);
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0)
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    return m;
}

CvResult kfold_cv(const std::vector<const GraphSample*>& train, int k, LayerKind kind,
                  const Hyperparams& hp, std::uint64_t seed, int threads) {
    if (k < 2 || static_cast<int>(train.size()) < k)
        throw std::invalid_argument("kfold_cv: require 2 <= k <= |train|");

    // stratified round-robin fold assignment
    std::vector<int> fold_of(train.size());
    for (int c = 0; c < 2; ++c) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const bool pos = train[i]->graph_label == GraphLabel::NoAttackAllHavePay;
            if ((c == 1) == pos) idx.push_back(static_cast<int>(i));
        }
        Rng rng(derive_seed(seed, 0x90 + c));
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.next_below(i)]);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fold_of[idx[i]] = static_cast<int>(i) % k;
    }

    CvResult res;
    for (int f = 0; f < k; ++f) {
        std::vector<const GraphSample*> fold_train, fold_val;
        for (std::size_t i = 0; i < train.size(); ++i)
            (fold_of[i] == f ? fold_val : fold_train).push_back(train[i]);
        TrainResult tr =
            train_model(fold_train, kind, hp, derive_seed(seed, 0xA0 + f), threads);
        res.fold_accuracy.push_back(
            evaluate(tr.model, fold_val, hp.scale_features_by_degree, threads).accuracy);
    }
    res.mean_accuracy =
        std::accumulate(res.fold_accuracy.begin(), res.fold_accuracy.end(), 0.0) / k;
    return res;
}

namespace {

std::string hexd(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hexd(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

char label_char(NodeLabel l) {
    switch (l) {
    case NodeLabel::ObserverWithoutPay: return '0';
    case NodeLabel::NonObserver: return '5';
    case NodeLabel::ObserverWithPay: return '1';
    }
    return '?';
}

NodeLabel label_from_char(char c) {
    if (c == '0') return NodeLabel::ObserverWithoutPay;
    if (c == '5') return NodeLabel::NonObserver;
    if (c == '1') return NodeLabel::ObserverWithPay;
    throw std::runtime_error("dataset file: bad node label character");
}

} // namespace

void write_dataset(std::ostream& os, const DatasetSpec& spec,
                   const std::vector<GraphSample>& samples) {
    os << "dsd-dataset 1 n=" << spec.n << " k=" << spec.observer_count
       << " samples=" << spec.total_samples
       << " positive_fraction=" << hexd(spec.positive_fraction) << " ba_m=" << spec.ba_m
       << " latency_mean=" << hexd(spec.latency_mean) << " latency_model="
       << (spec.latency_model == LatencyModel::Exponential ? "exp" : "uniform")
       << " attack_delay_max=" << hexd(spec.attack_delay_max)
       << " shared_topology=" << (spec.shared_topology ? 1 : 0)
       << " master_seed=" << spec.master_seed << '\n';
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const GraphSample& s = samples[i];
        os << "sample " << i << " seed=" << s.sample_seed << " topo=" << s.topology.node_count
           << ',' << s.topology.ba_m << ',' << s.topology.seed << " label="
           << (s.graph_label == GraphLabel::NoAttackAllHavePay ? "pos" : "neg")
           << " pay_holders=" << s.pay_holder_count << " observers=";
        for (std::size_t j = 0; j < s.observers.size(); ++j)
            os << (j ? "," : "") << s.observers[j];
        os << " node_labels=";
        for (NodeLabel l : s.labels.labels) os << label_char(l);
        os << " features=";
        for (std::size_t j = 0; j < s.features.data.size(); ++j)
            os << (j ? " " : "") << s.features.data[j];
        os << '\n';
    }
}

std::vector<GraphSample> read_dataset(std::istream& is, DatasetSpec* spec_out, int threads) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("dataset file: empty");
    DatasetSpec spec;
    {
        std::istringstream hdr(line);
        std::string magic;
        int version = 0;
        hdr >> magic >> version;
        if (magic != "dsd-dataset" || version != 1)
            throw std::runtime_error("dataset file: bad magic");
        std::string tok;
        while (hdr >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw std::runtime_error("dataset file: bad header");
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "n") spec.n = std::stoi(val);
            else if (key == "k") spec.observer_count = std::stoi(val);
            else if (key == "samples") spec.total_samples = std::stoi(val);
            else if (key == "positive_fraction") spec.positive_fraction = parse_hexd(val);
            else if (key == "ba_m") spec.ba_m = std::stoi(val);
            else if (key == "latency_mean") spec.latency_mean = parse_hexd(val);
            else if (key == "latency_model")
                spec.latency_model =
                    val == "exp" ? LatencyModel::Exponential : LatencyModel::UniformJitter;
            else if (key == "attack_delay_max") spec.attack_delay_max = parse_hexd(val);
            else if (key == "shared_topology") spec.shared_topology = val == "1";
            else if (key == "master_seed") spec.master_seed = std::stoull(val);
        }
    }

    struct RawSample {
        std::uint64_t seed = 0, topo_seed = 0;
        int topo_n = 0, topo_m = 0;
        bool positive = false;
        int pay_holders = 0;
        std::string observers, node_labels, features;
    };
    std::vector<RawSample> raw;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        std::size_t idx;
        ls >> word >> idx;
        if (word != "sample" || idx != raw.size())
            throw std::runtime_error("dataset file: bad record order");
        RawSample r;
        std::string tok;
        while (ls >> tok) {
            const auto eq = tok.find('=');
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "seed") r.seed = std::stoull(val);
            else if (key == "topo") {
                const auto c1 = val.find(','), c2 = val.find(',', c1 + 1);
                if (c1 == std::string::npos || c2 == std::string::npos)
                    throw std::runtime_error("dataset file: bad topo field");
                r.topo_n = std::stoi(val.substr(0, c1));
                r.topo_m = std::stoi(val.substr(c1 + 1, c2 - c1 - 1));
                r.topo_seed = std::stoull(val.substr(c2 + 1));
            } else if (key == "label") r.positive = val == "pos";
            else if (key == "pay_holders") r.pay_holders = std::stoi(val);
            else if (key == "observers") r.observers = val;
            else if (key == "node_labels") r.node_labels = val;
            else if (key == "features") {
                r.features = val;
                std::string rest;
                std::getline(ls, rest);
                r.features += rest;
            }
        }
        raw.push_back(std::move(r));
    }

    std::vector<GraphSample> samples(raw.size());
    const int nthreads = resolve_threads(threads);
    std::string error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
    for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
        try {
            const RawSample& r = raw[i];
            GraphSample& s = samples[i];
            s.sample_seed = r.seed;
            s.topology = generate_ba(r.topo_n, r.topo_m, r.topo_seed);
            s.graph_label =
                r.positive ? GraphLabel::NoAttackAllHavePay : GraphLabel::AttackPresent;
            s.pay_holder_count = r.pay_holders;
            {
                std::istringstream os_(r.observers);
                std::string piece;
                while (std::getline(os_, piece, ',')) s.observers.push_back(std::stoi(piece));
            }
            if (static_cast<int>(r.node_labels.size()) != r.topo_n)
                throw std::runtime_error("dataset file: node_labels length mismatch");
            s.labels.observers = s.observers;
            s.labels.labels.resize(r.topo_n);
            for (int v = 0; v < r.topo_n; ++v)
                s.labels.labels[v] = label_from_char(r.node_labels[v]);
            s.features = extract_features(s.topology, s.labels, 1);
            // integrity: stored features must match re-extraction
            std::istringstream fs(r.features);
            for (std::size_t j = 0; j < s.features.data.size(); ++j) {
                long long stored;
                if (!(fs >> stored) || stored != s.features.data[j])
                    throw std::runtime_error("dataset file: feature mismatch on re-extraction");
            }
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (error.empty()) error = e.what();
        }
    }
    if (!error.empty()) throw std::runtime_error(error);
    if (spec_out) *spec_out = spec;
    return samples;
}

void write_metrics_report(std::ostream& os, const std::string& layer, int observer_count,
                          const EvalMetrics& m, const CvResult* cv) {
    char buf[64];
    auto fmt = [&](const std::optional<double>& v) -> std::string {
        if (!v) return "undefined";
        std::snprintf(buf, sizeof buf, "%.6f", *v);
        return buf;
    };
    os << "dsd-metrics 1\n";
    os << "layer " << layer << '\n';
    os << "observers " << observer_count << '\n';
    os << "confusion tp=" << m.tp << " fp=" << m.fp << " fn=" << m.fn << " tn=" << m.tn
       << '\n';
    std::snprintf(buf, sizeof buf, "%.6f", m.accuracy);
    os << "accuracy " << buf << '\n';
    os << "precision " << fmt(m.precision) << '\n';
    os << "recall " << fmt(m.recall) << '\n';
    os << "f1 " << fmt(m.f1) << '\n';
    if (cv) {
        os << "cv_folds " << cv->fold_accuracy.size() << '\n';
        for (std::size_t i = 0; i < cv->fold_accuracy.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.6f", cv->fold_accuracy[i]);
            os << "cv_fold " << i << ' ' << buf << '\n';
        }
        std::snprintf(buf, sizeof buf, "%.6f", cv->mean_accuracy);
        os << "cv_mean " << buf << '\n';
    }
}

} // namespace dsd
