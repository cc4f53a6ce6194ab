#include "dqe/ratings.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dqe {

RatingAggregate aggregate_one(const std::vector<int>& stars) {
  if (stars.empty()) throw EmptyGroup("no ratings for group");
  RatingAggregate agg;
  agg.count = stars.size();
  agg.min_stars = stars[0];
  agg.max_stars = stars[0];
  double sum = 0;
  for (int s : stars) {
    sum += s;
    agg.min_stars = std::min(agg.min_stars, s);
    agg.max_stars = std::max(agg.max_stars, s);
  }
  agg.mean_stars = sum / static_cast<double>(stars.size());
  return agg;
}

std::map<SegKey, RatingAggregate> RatingSet::aggregate() const {
  std::map<SegKey, std::vector<int>> groups;
  for (const auto& r : records) groups[{r.exam_id, r.seg_id}].push_back(r.stars);
  std::map<SegKey, RatingAggregate> out;
  for (auto& [key, stars] : groups) out[key] = aggregate_one(stars);
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

RatingSet read_ratings_csv(const std::string& path) {
  if (!std::filesystem::exists(path)) throw FileNotFound("ratings CSV not found: " + path);
  std::ifstream f(path);
  if (!f) throw IOFailure("cannot open ratings CSV: " + path);

  RatingSet set;
  std::string line;
  if (!std::getline(f, line)) throw IOFailure("empty ratings CSV: " + path);
  const auto header = split_line(line);
  const std::vector<std::string> expected{"exam_id", "seg_id", "view", "rater_id", "stars"};
  if (header != expected)
    throw IOFailure("ratings CSV header must be exam_id,seg_id,view,rater_id,stars: " + path);

  size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 5)
      throw IOFailure("ratings CSV line " + std::to_string(lineno) + ": expected 5 fields");
    RatingRecord r;
    r.exam_id = fields[0];
    r.seg_id = fields[1];
    r.view = fields[2].empty() ? Axis::axial : axis_from_string(fields[2]);
    r.rater_id = fields[3];
    try {
      r.stars = std::stoi(fields[4]);
    } catch (const std::exception&) {
      throw IOFailure("ratings CSV line " + std::to_string(lineno) + ": bad stars value");
    }
    if (r.stars < 1 || r.stars > 6)
      throw IOFailure("ratings CSV line " + std::to_string(lineno) + ": stars " +
                      std::to_string(r.stars) + " outside [1,6]");
    set.records.push_back(std::move(r));
  }
  return set;
}

void write_ratings_csv(const RatingSet& set, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw IOFailure("cannot create: " + tmp);
    f << "exam_id,seg_id,view,rater_id,stars\n";
    for (const auto& r : set.records)
      f << r.exam_id << ',' << r.seg_id << ',' << to_string(r.view) << ',' << r.rater_id << ','
        << r.stars << '\n';
    if (!f.good()) throw IOFailure("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IOFailure("cannot move into place: " + path);
}

DatasetSplit split_dataset(std::vector<std::string> exam_ids, double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidFraction("train fraction must lie in (0,1), got " + std::to_string(train_fraction));

  std::sort(exam_ids.begin(), exam_ids.end());
  exam_ids.erase(std::unique(exam_ids.begin(), exam_ids.end()), exam_ids.end());
  if (exam_ids.empty()) throw EmptyInput("split_dataset: no exam ids");

  Rng rng(seed);
  // Fisher-Yates
  for (size_t i = exam_ids.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
    std::swap(exam_ids[i - 1], exam_ids[j]);
  }

  const size_t n_train = static_cast<size_t>(
      std::lround(train_fraction * static_cast<double>(exam_ids.size())));
  DatasetSplit split;
  split.train_ids.assign(exam_ids.begin(), exam_ids.begin() + static_cast<long>(n_train));
  split.test_ids.assign(exam_ids.begin() + static_cast<long>(n_train), exam_ids.end());
  return split;
}

}  // namespace dqe
