#include "rba/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "rba/error.hpp"

namespace rba {

double qrab(std::span<const double> magnitudes, std::size_t t) {
  if (magnitudes.empty()) throw DataError("qrab: empty ranking list");
  const std::size_t k = std::min(t, magnitudes.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += magnitudes[i];
  return sum / static_cast<double>(k);
}

double qarab(std::span<const double> magnitudes, std::size_t t) {
  if (magnitudes.empty()) throw DataError("qarab: empty ranking list");
  const std::size_t k = std::min(t, magnitudes.size());
  // Running prefix sum makes each term bit-identical to a fresh qrab call.
  double prefix = 0.0;
  double sum = 0.0;
  for (std::size_t x = 1; x <= k; ++x) {
    prefix += magnitudes[x - 1];
    sum += prefix / static_cast<double>(x);
  }
  return sum / static_cast<double>(k);
}

QueryBias query_bias(const JoinedQuery& query, std::size_t cutoff) {
  if (query.magnitudes.empty())
    throw DataError("query " + query.query_id + ": empty ranking list");
  std::vector<double> female, male;
  female.reserve(query.magnitudes.size());
  male.reserve(query.magnitudes.size());
  for (const GenderMagnitude& mag : query.magnitudes) {
    female.push_back(mag.female);
    male.push_back(mag.male);
  }
  QueryBias bias;
  bias.query_id = query.query_id;
  bias.cutoff = cutoff;
  bias.qrab_female = qrab(female, cutoff);
  bias.qrab_male = qrab(male, cutoff);
  bias.qarab_female = qarab(female, cutoff);
  bias.qarab_male = qarab(male, cutoff);
  bias.rab = bias.qrab_male - bias.qrab_female;
  bias.arab = bias.qarab_male - bias.qarab_female;
  bias.effective_depth = std::min(cutoff, query.magnitudes.size());
  return bias;
}

ModelBias model_bias(std::span<const QueryBias> biases, const std::string& model_tag,
                     Measure measure, TfMode tf_mode, std::size_t cutoff) {
  if (biases.empty())
    throw DataError("model " + model_tag + ": no queries with a non-empty ranking list");
  ModelBias model;
  model.model_tag = model_tag;
  model.measure = measure;
  model.tf_mode = tf_mode;
  model.cutoff = cutoff;
  double rab_sum = 0.0, arab_sum = 0.0;
  for (const QueryBias& bias : biases) {
    rab_sum += bias.rab;
    arab_sum += bias.arab;
  }
  model.rab = rab_sum / static_cast<double>(biases.size());
  model.arab = arab_sum / static_cast<double>(biases.size());
  model.n_queries = biases.size();
  return model;
}

RunBiases per_query_biases(const JoinedRun& run, std::size_t cutoff) {
  RunBiases out;
  for (const JoinedQuery& query : run.queries) {
    if (query.magnitudes.empty()) {
      ++out.n_excluded;
      continue;
    }
    out.per_query.push_back(query_bias(query, cutoff));
  }
  return out;
}

void write_per_query_tsv(std::ostream& out, const JoinedRun& run,
                         const std::vector<std::size_t>& cutoffs) {
  out << "# rba-per-query model=" << run.model_tag << " measure="
      << to_string(run.measure) << " tf_mode="
      << (run.measure == Measure::boolean ? std::string_view("-")
                                          : to_string(run.tf_mode))
      << '\n';
  out << "qid\tcutoff\tmeasure\trab\tarab\teffective_depth\n";
  char buf[40];
  for (std::size_t cutoff : cutoffs) {
    RunBiases biases = per_query_biases(run, cutoff);
    for (const QueryBias& bias : biases.per_query) {
      out << bias.query_id << '\t' << cutoff << '\t' << to_string(run.measure);
      std::snprintf(buf, sizeof(buf), "%.9g", bias.rab);
      out << '\t' << buf;
      std::snprintf(buf, sizeof(buf), "%.9g", bias.arab);
      out << '\t' << buf << '\t' << bias.effective_depth << '\n';
    }
  }
}

}  // namespace rba
