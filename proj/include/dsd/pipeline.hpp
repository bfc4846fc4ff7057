#ifndef DSD_PIPELINE_HPP
#define DSD_PIPELINE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dsd/gnn.hpp"
#include "dsd/observation.hpp"
#include "dsd/propagation.hpp"
#include "dsd/topology.hpp"

namespace dsd {

struct GraphSample {
    Topology topology;
    std::vector<int> observers;
    NodeLabelAssignment labels;
    FeatureMatrix features;
    GraphLabel graph_label = GraphLabel::NoAttackAllHavePay;
    int pay_holder_count = 0;
    std::uint64_t sample_seed = 0;
};

struct DatasetSpec {
    int n = 14000;
    int observer_count = 250;
    int total_samples = 1000;
    double positive_fraction = 0.5;
    int ba_m = 8;
    double latency_mean = 1.0;
    LatencyModel latency_model = LatencyModel::UniformJitter;
    // Attack-injection delays are drawn uniformly from [0, attack_delay_max];
    // <= 0 means auto: 0.5 * latency_mean, which spreads attack partitions
    // from near-half down to a few nodes without degenerating to singletons.
    double attack_delay_max = 0.0;
    // Reuse one topology across samples (speed mode); default regenerates.
    bool shared_topology = false;
    std::uint64_t master_seed = 1;
};

struct Hyperparams {
    int d_h = 32;
    double dropout_p = 0.3;
    double lr = 0.01, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    int epochs = 100;
    int batch_size = 32;
    int early_stop_patience = 10; // epochs without train-loss improvement
    // Per-hop fraction scaling keeps inputs in [0,1]; raw hub counts reach the
    // hundreds and saturate the softmax readout, which stalls training.
    bool scale_features_by_degree = true;
};

struct EvalMetrics {
    // positive class = NoAttackAllHavePay
    long tp = 0, fp = 0, fn = 0, tn = 0;
    double accuracy = 0.0;
    std::optional<double> precision, recall, f1; // empty when denominator is 0
};

struct TrainResult {
    ModelParams model;
    std::vector<double> loss_curve; // mean training loss per epoch
};

struct CvResult {
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
};

// Fully reproducible from spec.master_seed; parallel across samples.
std::vector<GraphSample> build_dataset(const DatasetSpec& spec, int threads = 0);

// Stratified by graph label; train gets round(fraction * total) samples.
void split_dataset(const std::vector<GraphSample>& samples, double train_fraction,
                   std::uint64_t seed, std::vector<const GraphSample*>& train,
                   std::vector<const GraphSample*>& test);

TrainResult train_model(const std::vector<const GraphSample*>& train, LayerKind kind,
                        const Hyperparams& hp, std::uint64_t seed, int threads = 0);

CvResult kfold_cv(const std::vector<const GraphSample*>& train, int k, LayerKind kind,
                  const Hyperparams& hp, std::uint64_t seed, int threads = 0);

// argmax prediction; exactly equal logits predict AttackPresent.
GraphLabel predict(const ModelParams& model, const GraphSample& s, bool scale_features);

EvalMetrics evaluate(const ModelParams& model, const std::vector<const GraphSample*>& test,
                     bool scale_features = true, int threads = 0);

EvalMetrics metrics_from_confusion(long tp, long fp, long fn, long tn);

// Node features as model input (int counts to double, optional 1/deg row scale).
Mat feature_input(const GraphSample& s, bool scale_by_degree);

// Dataset file: header line echoing the spec, then one self-describing record
// per sample. Topologies are stored as (n, ba_m, seed) generator references
// and verified on load. Byte-identical for identical builds.
void write_dataset(std::ostream& os, const DatasetSpec& spec,
                   const std::vector<GraphSample>& samples);
std::vector<GraphSample> read_dataset(std::istream& is, DatasetSpec* spec_out = nullptr,
                                      int threads = 0);

// Metrics report: key=value lines plus optional CV fold table; parseable by
// the `report` subcommand.
void write_metrics_report(std::ostream& os, const std::string& layer, int observer_count,
                          const EvalMetrics& m, const CvResult* cv = nullptr);

} // namespace dsd

#endif
