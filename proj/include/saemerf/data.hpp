#ifndef SAEMERF_DATA_HPP
#define SAEMERF_DATA_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "saemerf/errors.hpp"

namespace saemerf {

// Unit-level survey records grouped into areas. Rows keep file order; areas
// are indexed densely in order of first appearance.
struct SurveyDataset {
  std::vector<std::string> covariate_names;      // length p
  Eigen::MatrixXd x;                             // n x p
  Eigen::VectorXd y;                             // n
  std::vector<int> row_area;                     // n, dense area index
  std::vector<std::string> area_ids;             // D_s
  std::vector<std::vector<int>> rows_by_area;    // D_s

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }
  int num_areas() const { return static_cast<int>(area_ids.size()); }
  int area_size(int a) const { return static_cast<int>(rows_by_area[a].size()); }

  // Dense index for an area id, or -1 when the area was never sampled.
  int area_index(const std::string& id) const {
    auto it = area_lookup_.find(id);
    return it == area_lookup_.end() ? -1 : it->second;
  }

  void rebuild_index() {
    area_lookup_.clear();
    for (int a = 0; a < num_areas(); ++a) area_lookup_[area_ids[a]] = a;
  }

  void validate() const {
    if (x.rows() == 0) throw DataError("survey has no records");
    if (x.rows() != y.size() || x.rows() != static_cast<Eigen::Index>(row_area.size()))
      throw DataError("survey arrays disagree on the number of records");
    if (static_cast<std::size_t>(p()) != covariate_names.size())
      throw DataError("survey covariate names do not match the covariate count");
    if (!y.allFinite() || !x.allFinite())
      throw DataError("survey contains non-finite values");
    for (int a = 0; a < num_areas(); ++a)
      if (rows_by_area[a].empty())
        throw DataError("sampled area '" + area_ids[a] + "' has no records");
  }

 private:
  std::unordered_map<std::string, int> area_lookup_;
};

// Area-level census aggregates: population counts and covariate means.
// May list areas absent from the survey (out-of-sample areas).
struct AggregateTable {
  std::vector<std::string> covariate_names;  // length p, same order as survey
  std::vector<std::string> area_ids;         // D
  std::vector<double> population_size;       // N_i
  Eigen::MatrixXd mean_x;                    // D x p

  int num_areas() const { return static_cast<int>(area_ids.size()); }
  int p() const { return static_cast<int>(mean_x.cols()); }

  int area_index(const std::string& id) const {
    auto it = area_lookup_.find(id);
    return it == area_lookup_.end() ? -1 : it->second;
  }

  void rebuild_index() {
    area_lookup_.clear();
    for (int a = 0; a < num_areas(); ++a) area_lookup_[area_ids[a]] = a;
  }

  // Covariate order must match the survey exactly; silent reordering is
  // never attempted.
  void validate_against(const SurveyDataset& survey) const {
    if (covariate_names != survey.covariate_names)
      throw FormatError("aggregate covariate columns do not match the survey columns");
    for (int a = 0; a < num_areas(); ++a) {
      if (!std::isfinite(population_size[a]) || population_size[a] < 1)
        throw DataError("area '" + area_ids[a] + "' has invalid population size");
      const int s = survey.area_index(area_ids[a]);
      if (s >= 0 && population_size[a] < survey.area_size(s))
        throw DataError("area '" + area_ids[a] + "' has N smaller than its sample size");
    }
    for (int s = 0; s < survey.num_areas(); ++s)
      if (area_index(survey.area_ids[s]) < 0)
        throw DataError("sampled area '" + survey.area_ids[s] + "' missing from aggregates");
    if (!mean_x.allFinite()) throw DataError("aggregate covariate means contain non-finite values");
  }

 private:
  std::unordered_map<std::string, int> area_lookup_;
};

// Unit-level covariates for the whole population; only needed by the
// estimator that assumes census micro-data access.
struct PopulationDataset {
  std::vector<std::string> covariate_names;
  Eigen::MatrixXd x;                           // N x p
  std::vector<int> row_area;                   // N, dense area index
  std::vector<std::string> area_ids;
  std::vector<std::vector<int>> rows_by_area;

  int area_index(const std::string& id) const {
    auto it = area_lookup_.find(id);
    return it == area_lookup_.end() ? -1 : it->second;
  }

  void rebuild_index() {
    area_lookup_.clear();
    for (int a = 0; a < static_cast<int>(area_ids.size()); ++a) area_lookup_[area_ids[a]] = a;
  }

 private:
  std::unordered_map<std::string, int> area_lookup_;
};

}  // namespace saemerf

#endif  // SAEMERF_DATA_HPP
