#include "eyetrack/ensemble.hpp"

#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "eyetrack/errors.hpp"

namespace eyetrack {

using nlohmann::json;

std::vector<std::uint64_t> EnsembleSpec::resolved_seeds() const {
  std::vector<std::uint64_t> out = seeds;
  if (out.empty()) {
    for (int i = 1; i <= n_members; ++i) out.push_back(static_cast<std::uint64_t>(i));
  }
  if (static_cast<int>(out.size()) != n_members) {
    throw ConfigError("ensemble needs one seed per member (" + std::to_string(n_members) +
                      " members, " + std::to_string(out.size()) + " seeds)");
  }
  if (std::set<std::uint64_t>(out.begin(), out.end()).size() != out.size()) {
    throw ConfigError("ensemble seeds must be distinct");
  }
  return out;
}

namespace {

// The member identity a finished run would carry; lets a rerun skip it.
std::string expected_member_key(const nn::NeuralCheckpoint& init,
                                const std::vector<EnsembleStage>& stages,
                                std::uint64_t seed) {
  std::vector<nn::StageInfo> infos = init.provenance.stages;
  for (const auto& st : stages) {
    nn::StageInfo info;
    info.data_label = st.label;
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(dataset_hash(*st.data)));
    info.data_hash = buf;
    info.config = st.config;
    info.config.seed = seed;
    infos.push_back(std::move(info));
  }
  return nn::ensemble_member_key(init.model.cfg, infos, seed);
}

}  // namespace

std::vector<MemberOutcome> train_ensemble(
    const std::function<nn::NeuralCheckpoint(std::uint64_t seed)>& make_init,
    const std::vector<EnsembleStage>& stages, const EnsembleSpec& spec,
    const std::filesystem::path& out_dir, int jobs, std::ostream* heartbeat) {
  if (stages.empty()) throw ConfigError("ensemble needs at least one training stage");
  const std::vector<std::uint64_t> seeds = spec.resolved_seeds();
  std::filesystem::create_directories(out_dir);

  std::vector<MemberOutcome> outcomes(seeds.size());
  std::mutex io_mutex;

  auto run_member = [&](int index) {
    MemberOutcome& outcome = outcomes[index];
    outcome.index = index;
    outcome.seed = seeds[index];
    outcome.dir = out_dir / ("member_" + std::to_string(index + 1));
    try {
      nn::NeuralCheckpoint init = make_init(outcome.seed);
      const std::string key = expected_member_key(init, stages, outcome.seed);
      if (std::filesystem::exists(outcome.dir / "provenance.json")) {
        try {
          const nn::NeuralCheckpoint existing = nn::NeuralCheckpoint::load(outcome.dir);
          if (existing.provenance.member_key == key) {
            outcome.ok = true;
            outcome.skipped = true;
            if (heartbeat) {
              std::lock_guard<std::mutex> lock(io_mutex);
              (*heartbeat) << "member " << index + 1 << " already complete, skipping\n";
            }
            return;
          }
        } catch (const std::exception&) {
          // unreadable leftovers: retrain below
        }
      }
      for (const auto& st : stages) {
        nn::TrainConfig cfg = st.config;
        cfg.seed = outcome.seed;
        std::filesystem::create_directories(outcome.dir);
        nn::TrainCallbacks cb;
        cb.stage_label = "member " + std::to_string(index + 1) + "/" + st.label;
        // per-epoch heartbeat only in sequential mode; parallel members
        // still log to their own train_log.jsonl
        cb.heartbeat = jobs <= 1 ? heartbeat : nullptr;
        cb.log_file = outcome.dir / "train_log.jsonl";
        nn::train(init, *st.data, cfg, st.label, cb);
      }
      init.save(outcome.dir);
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error = e.what();
      if (heartbeat) {
        std::lock_guard<std::mutex> lock(io_mutex);
        (*heartbeat) << "member " << index + 1 << " failed: " << e.what() << "\n";
      }
    }
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) run_member(static_cast<int>(i));
  } else {
    std::size_t next = 0;
    while (next < seeds.size()) {
      std::vector<std::thread> pool;
      const std::size_t wave = std::min<std::size_t>(jobs, seeds.size() - next);
      for (std::size_t k = 0; k < wave; ++k) {
        pool.emplace_back(run_member, static_cast<int>(next + k));
      }
      for (auto& t : pool) t.join();
      next += wave;
    }
  }
  return outcomes;
}

void write_ensemble_manifest(const std::vector<MemberOutcome>& members,
                             const std::filesystem::path& path) {
  json entries = json::array();
  std::size_t failed = 0;
  for (const auto& m : members) {
    if (!m.ok) {
      ++failed;
      continue;
    }
    entries.push_back({{"path", m.dir.string()}, {"seed", m.seed}});
  }
  if (entries.empty()) throw TrainingError("no ensemble member finished successfully");
  json j{{"format", "eyetrack-ensemble"}, {"version", 1}, {"members", std::move(entries)}};
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write manifest: " + path.string());
  f << j.dump(2) << "\n";
  if (failed > 0) {
    std::cerr << "warning: " << failed << " ensemble member(s) failed; manifest lists the "
              << entries.size() << " usable member(s)\n";
  }
}

std::vector<ManifestEntry> read_ensemble_manifest(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open manifest: " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ParseError("invalid manifest " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "eyetrack-ensemble") {
    throw SchemaError("not an ensemble manifest: " + path.string());
  }
  std::vector<ManifestEntry> out;
  for (const auto& entry : j.at("members")) {
    out.push_back({std::filesystem::path(entry.at("path").get<std::string>()),
                   entry.value("seed", std::uint64_t{0})});
  }
  if (out.empty()) throw SchemaError("manifest lists no members: " + path.string());
  return out;
}

std::vector<GazeTargets> average_predictions(
    const std::vector<std::vector<GazeTargets>>& member_predictions) {
  if (member_predictions.empty()) throw IntegrityError("average over zero members");
  const std::size_t n = member_predictions.front().size();
  for (const auto& preds : member_predictions) {
    if (preds.size() != n) {
      throw IntegrityError("member prediction shapes differ (" + std::to_string(preds.size()) +
                           " vs " + std::to_string(n) + " tokens)");
    }
  }
  std::vector<GazeTargets> out(n);
  const double scale = 1.0 / static_cast<double>(member_predictions.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      double sum = 0.0;
      for (const auto& preds : member_predictions) sum += preds[i][f];
      out[i][f] = sum * scale;
    }
  }
  return out;
}

}  // namespace eyetrack
