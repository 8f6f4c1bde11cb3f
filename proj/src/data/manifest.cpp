#include "cogan/data/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <tuple>

#include "cogan/data/image_io.hpp"
#include "cogan/error.hpp"
#include "cogan/util/config.hpp"

namespace fs = std::filesystem;

namespace cogan::data {

ScaleProfile ScaleProfile::by_name(std::string_view name) {
  if (name == "paper") return paper();
  if (name == "desk") return desk();
  reject("unknown scale profile: " + std::string(name));
}

std::string to_string(Spectrum s) { return s == Spectrum::Vis ? "VIS" : "NIR"; }
std::string to_string(Split s) { return s == Split::Train ? "TRAIN" : "TEST"; }

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<int> parse_index(const std::string& stem) {
  int value = 0;
  const auto* end = stem.data() + stem.size();
  auto [ptr, ec] = std::from_chars(stem.data(), end, value);
  if (ec != std::errc{} || ptr != end || value < 0) return std::nullopt;
  return value;
}

std::vector<fs::path> sorted_subdirs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Spectrum spectrum_from_string(std::string_view s) {
  const auto v = lower(s);
  if (v == "vis") return Spectrum::Vis;
  if (v == "nir") return Spectrum::Nir;
  reject("unknown spectrum: " + std::string(s));
}

Split split_from_string(std::string_view s) {
  const auto v = lower(s);
  if (v == "train") return Split::Train;
  if (v == "test") return Split::Test;
  reject("unknown split: " + std::string(s));
}

std::vector<std::string> DatasetManifest::classes(Split split) const {
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (r.split == split) ids.insert(r.class_id);
  }
  return {ids.begin(), ids.end()};
}

std::vector<std::size_t> DatasetManifest::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].split == split) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> DatasetManifest::indices(Split split, Spectrum spectrum) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].split == split && records[i].spectrum == spectrum) out.push_back(i);
  }
  return out;
}

void DatasetManifest::validate() const {
  std::set<std::tuple<std::string, Spectrum, int>> keys;
  std::map<std::string, Split> class_split;
  std::map<std::string, std::pair<int, int>> per_spectrum;

  for (const auto& r : records) {
    if (r.sample_index < 0) reject("negative sample index for class " + r.class_id);
    if (!keys.emplace(r.class_id, r.spectrum, r.sample_index).second) {
      reject("duplicate record: class " + r.class_id + ", " + to_string(r.spectrum) + ", index " +
             std::to_string(r.sample_index));
    }
    auto [it, inserted] = class_split.emplace(r.class_id, r.split);
    if (!inserted && it->second != r.split) {
      reject("class " + r.class_id + " appears in both TRAIN and TEST");
    }
    auto& counts = per_spectrum[r.class_id];
    (r.spectrum == Spectrum::Vis ? counts.first : counts.second) += 1;
  }
  for (const auto& [id, counts] : per_spectrum) {
    if (counts.first == 0) reject("class " + id + " has no VIS images");
    if (counts.second == 0) reject("class " + id + " has no NIR images");
  }
}

DatasetManifest build_manifest(const fs::path& root, const SplitRule& rule, const BuildOptions& options) {
  if (!fs::is_directory(root)) reject("dataset root is not a directory: " + root.string());

  DatasetManifest manifest;
  manifest.root = root;

  // Directory names are matched case-insensitively; a class needs both spectra.
  const auto subjects = sorted_subdirs(root);
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    const auto subject = subjects[s].filename().string();
    for (const auto& eye_dir : sorted_subdirs(subjects[s])) {
      const auto eye = eye_dir.filename().string();
      const auto class_id = subject + "_" + eye;

      Split split = Split::Test;
      if (s < rule.train_subjects) {
        split = Split::Train;
      } else if (s == rule.train_subjects && rule.extra_train_eye && lower(*rule.extra_train_eye) == lower(eye)) {
        split = Split::Train;
      }

      bool has_vis = false;
      bool has_nir = false;
      for (const auto& spectrum_dir : sorted_subdirs(eye_dir)) {
        const auto name = lower(spectrum_dir.filename().string());
        if (name != "vis" && name != "nir") continue;
        const auto spectrum = spectrum_from_string(name);

        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(spectrum_dir)) {
          if (entry.is_regular_file() && lower(entry.path().extension().string()) == ".png") {
            files.push_back(entry.path());
          }
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
          const auto index = parse_index(file.stem().string());
          if (!index) reject("image name is not a sample index: " + file.string());
          manifest.records.push_back(ImageRecord{
              .path = fs::relative(file, root),
              .subject = subject,
              .eye = eye,
              .class_id = class_id,
              .spectrum = spectrum,
              .sample_index = *index,
              .split = split,
          });
          (spectrum == Spectrum::Vis ? has_vis : has_nir) = true;
        }
      }
      if (!has_vis && !has_nir) continue;
      if (!has_vis) reject("class " + class_id + " is missing VIS images");
      if (!has_nir) reject("class " + class_id + " is missing NIR images");
    }
  }

  manifest.validate();
  if (options.compute_stats && !manifest.indices(Split::Train).empty()) {
    manifest.channel_stats = compute_channel_stats(manifest, options.profile, options.channels);
  }
  return manifest;
}

DatasetManifest with_train_classes(const DatasetManifest& manifest, const std::vector<std::string>& train_classes,
                                   const std::vector<std::string>& test_classes) {
  const std::set<std::string> train(train_classes.begin(), train_classes.end());
  const std::set<std::string> test(test_classes.begin(), test_classes.end());
  DatasetManifest out;
  out.root = manifest.root;
  for (const auto& r : manifest.records) {
    const bool in_train = train.contains(r.class_id);
    const bool in_test = test.contains(r.class_id);
    if (in_train && in_test) reject("class " + r.class_id + " assigned to both splits");
    if (!in_train && !in_test) continue;
    auto copy = r;
    copy.split = in_train ? Split::Train : Split::Test;
    out.records.push_back(std::move(copy));
  }
  out.validate();
  return out;
}

ChannelStats compute_channel_stats(const DatasetManifest& manifest, const ScaleProfile& profile, int channels) {
  const auto train = manifest.indices(Split::Train);
  if (train.empty()) reject("cannot compute channel statistics: TRAIN split is empty");

  std::vector<long double> sum(channels, 0.0L);
  std::vector<long double> sum_sq(channels, 0.0L);
  long double count = 0.0L;
  for (auto i : train) {
    auto img = load_image(manifest.resolve(manifest.records[i]), profile.side, channels).to(torch::kFloat64);
    const auto pixels = img.reshape({channels, -1});
    auto acc = pixels.accessor<double, 2>();
    for (int c = 0; c < channels; ++c) {
      long double s = 0.0L;
      long double sq = 0.0L;
      for (int64_t p = 0; p < pixels.size(1); ++p) {
        const long double v = acc[c][p];
        s += v;
        sq += v * v;
      }
      sum[c] += s;
      sum_sq[c] += sq;
    }
    count += static_cast<long double>(pixels.size(1));
  }

  ChannelStats stats;
  stats.profile = profile.name;
  stats.channels = channels;
  for (int c = 0; c < channels; ++c) {
    const long double mean = sum[c] / count;
    const long double var = std::max(0.0L, sum_sq[c] / count - mean * mean);
    double sd = static_cast<double>(std::sqrt(var));
    if (sd < ChannelStats::kMinStd) {
      sd = ChannelStats::kMinStd;
      stats.degenerate = true;
    }
    stats.mean.push_back(static_cast<double>(mean));
    stats.stddev.push_back(sd);
  }
  return stats;
}

nlohmann::json to_json(const ChannelStats& stats) {
  return {{"profile", stats.profile},
          {"channels", stats.channels},
          {"mean", stats.mean},
          {"stddev", stats.stddev},
          {"degenerate", stats.degenerate}};
}

ChannelStats channel_stats_from_json(const nlohmann::json& doc) {
  ChannelStats s;
  s.profile = doc.at("profile").get<std::string>();
  s.channels = doc.at("channels").get<int>();
  s.mean = doc.at("mean").get<std::vector<double>>();
  s.stddev = doc.at("stddev").get<std::vector<double>>();
  s.degenerate = doc.value("degenerate", false);
  if (static_cast<int>(s.mean.size()) != s.channels || static_cast<int>(s.stddev.size()) != s.channels) {
    reject("channel statistics do not match channel count");
  }
  return s;
}

nlohmann::json to_json(const DatasetManifest& manifest) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : manifest.records) {
    records.push_back({{"path", r.path.generic_string()},
                       {"subject", r.subject},
                       {"eye", r.eye},
                       {"class_id", r.class_id},
                       {"spectrum", to_string(r.spectrum)},
                       {"sample_index", r.sample_index},
                       {"split", to_string(r.split)}});
  }
  nlohmann::json doc = {{"schema", "cogan.manifest/1"}, {"records", std::move(records)}};
  doc["channel_stats"] = manifest.channel_stats ? to_json(*manifest.channel_stats) : nlohmann::json(nullptr);
  return doc;
}

DatasetManifest manifest_from_json(const nlohmann::json& doc, const fs::path& root) {
  if (doc.value("schema", std::string{}) != "cogan.manifest/1") reject("unsupported manifest schema");
  DatasetManifest m;
  m.root = root;
  for (const auto& r : doc.at("records")) {
    m.records.push_back(ImageRecord{
        .path = fs::path(r.at("path").get<std::string>()),
        .subject = r.at("subject").get<std::string>(),
        .eye = r.at("eye").get<std::string>(),
        .class_id = r.at("class_id").get<std::string>(),
        .spectrum = spectrum_from_string(r.at("spectrum").get<std::string>()),
        .sample_index = r.at("sample_index").get<int>(),
        .split = split_from_string(r.at("split").get<std::string>()),
    });
  }
  if (doc.contains("channel_stats") && !doc["channel_stats"].is_null()) {
    m.channel_stats = channel_stats_from_json(doc["channel_stats"]);
  }
  m.validate();
  return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& file) {
  auto doc = to_json(manifest);
  const auto base = fs::weakly_canonical(fs::absolute(file).parent_path());
  const auto root = fs::weakly_canonical(fs::absolute(manifest.root));
  auto rel = root.lexically_relative(base);
  doc["root"] = rel.empty() ? root.generic_string() : rel.generic_string();
  util::write_json(file, doc);
}

DatasetManifest load_manifest(const fs::path& file) {
  const auto doc = util::read_json(file);
  const fs::path stored = doc.value("root", std::string{"."});
  const auto root = stored.is_absolute() ? stored : (file.parent_path() / stored).lexically_normal();
  return manifest_from_json(doc, root);
}

}  // namespace cogan::data
