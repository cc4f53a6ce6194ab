#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dqe/volume.hpp"

namespace dqe {

// One expert star rating of one segmentation view.
struct RatingRecord {
  std::string exam_id;
  std::string seg_id;
  Axis view = Axis::axial;  // empty view column defaults to axial
  std::string rater_id;
  int stars = 1;  // 1 (very bad) .. 6 (very good)
};

struct RatingAggregate {
  double mean_stars = 0;
  int min_stars = 0;
  int max_stars = 0;
  size_t count = 0;
};

using SegKey = std::pair<std::string, std::string>;  // (exam_id, seg_id)

struct RatingSet {
  std::vector<RatingRecord> records;

  // mean/min/max per (exam_id, seg_id), pooling views and raters
  std::map<SegKey, RatingAggregate> aggregate() const;
};

RatingAggregate aggregate_one(const std::vector<int>& stars);

// CSV with header exam_id,seg_id,view,rater_id,stars (UTF-8, no quoting).
RatingSet read_ratings_csv(const std::string& path);
void write_ratings_csv(const RatingSet& set, const std::string& path);

// Deterministic exam-level split: all segmentations of an exam land on one
// side. Ids are deduplicated and sorted before shuffling so the split
// depends only on the id set and the seed. Train side gets round(fraction*n).
struct DatasetSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

DatasetSplit split_dataset(std::vector<std::string> exam_ids, double train_fraction, uint64_t seed);

}  // namespace dqe
