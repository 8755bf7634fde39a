#include "recbench/pipeline.hpp"

#include "recbench/errors.hpp"
#include "recbench/raycast.hpp"
#include "recbench/sdf.hpp"

#include <map>

namespace recbench {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose) {
    // FNV-1a over the purpose, folded into a splitmix64 step.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : purpose) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    std::uint64_t x = seed ^ h;
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

AutodecoderResult train_sdf_on_dataset(const Dataset& dataset, const BenchConfig& cfg) {
    const auto train = dataset.split("train");
    if (train.empty()) throw InvalidInput("dataset has no training instances");
    std::vector<std::vector<SdfSample>> samples;
    for (const auto& inst : train) {
        samples.push_back(sample_training_set(load_mesh(dataset, inst), cfg.sampling,
                                              derive_seed(inst.shape.seed, "sdf-samples"), cfg.threads));
    }
    auto train_cfg = cfg.sdf;
    train_cfg.seed = derive_seed(cfg.seed, "sdf");
    train_cfg.threads = cfg.threads;
    return train_autodecoder(samples, train_cfg, cfg.latent_dim, cfg.hidden);
}

std::vector<MirrorPair> mirror_pairs_from_dataset(const Dataset& dataset, const BenchConfig& cfg) {
    const int res = cfg.eval.mirror_resolution > 0 ? cfg.eval.mirror_resolution : dataset.config.image_size;
    std::vector<MirrorPair> pairs;
    for (const auto& inst : dataset.split("train")) {
        const TriangleBvh bvh(load_mesh(dataset, inst));
        for (const auto& view : load_views(dataset, inst)) {
            pairs.push_back(make_mirror_pair(bvh, view.cam.resized(res, res), Point3::Zero()));
        }
    }
    if (pairs.empty()) throw InvalidInput("dataset has no training views");
    return pairs;
}

MirrorTrainResult train_mirror_on_pairs(const std::vector<MirrorPair>& pairs, const BenchConfig& cfg) {
    auto train_cfg = cfg.mirror;
    train_cfg.seed = derive_seed(cfg.seed, "mirror");
    train_cfg.threads = cfg.threads;
    return train_mirror_model(pairs, train_cfg);
}

std::vector<TimingSample> timing_samples(const Dataset& dataset, const DecoderParams& decoder,
                                         const BenchConfig& cfg) {
    std::map<Category, std::vector<InstanceRecord>> by_category;
    for (const auto& inst : dataset.split("test")) by_category[inst.category].push_back(inst);
    std::vector<InstanceRecord> chosen;
    for (std::size_t round = 0; chosen.size() < static_cast<std::size_t>(cfg.timing_objects); ++round) {
        bool any = false;
        for (const auto& [category, list] : by_category) {
            if (round < list.size() && chosen.size() < static_cast<std::size_t>(cfg.timing_objects)) {
                chosen.push_back(list[round]);
                any = true;
            }
        }
        if (!any) break;
    }
    if (chosen.empty()) throw InvalidInput("dataset has no test instances");
    std::vector<TimingSample> samples;
    for (const auto& inst : chosen) {
        auto view = load_views(dataset, inst).front();
        const auto partial =
            partial_view_samples(view.depth, view.cam, cfg.sdf.clamp_delta, cfg.eval.partial_view);
        LatentCode code = LatentCode::Zero(decoder.latent_dim);
        if (!partial.empty()) code = infer_latent(decoder, partial, cfg.sdf).code;
        samples.push_back({std::move(view.depth), view.cam, std::move(code)});
    }
    return samples;
}

}  // namespace recbench
