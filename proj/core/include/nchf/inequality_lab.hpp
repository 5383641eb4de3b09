#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nchf/field.hpp"

namespace nchf {

enum class InequalityId { kL2n, kW22r, kW22, kL3n, kLGNr, kLGN };

inline constexpr InequalityId kAllInequalities[] = {InequalityId::kL2n, InequalityId::kW22r,
                                                    InequalityId::kW22, InequalityId::kL3n,
                                                    InequalityId::kLGNr, InequalityId::kLGN};

std::string to_string(InequalityId id);
InequalityId parse_inequality_id(const std::string& name);

struct InequalityCase {
  InequalityId id = InequalityId::kL2n;
  double beta = 0.0;
  MapField field;
  CutoffField cutoff;
  double eps = 0.1;
  int n = 2;
};

struct RatioReport {
  InequalityId id;
  double lhs = 0.0;
  std::vector<std::pair<std::string, double>> rhs_terms;
  double ratio = 0.0;
  int res = 0;

  double rhs_total() const;
};

/// Explicit leading coefficient of the W22 displays, 4 + 2 beta / (n - 2).
/// At n = 2 only beta = 0 is meaningful and gives 4.
double w22_coefficient(int n, double beta);

/// Exponent gamma of the LGN displays: n / (n - 2), and 2 at n = 2.
double lgn_exponent(int n);

/// Both sides of one inequality with its unknown constant factored out.
/// Ball integrals run over the open ball d < r of the cutoff.
RatioReport eval_inequality(const InequalityCase& c);

/// ratio of L2n for a constant map, int phi^n / (|B| int |grad phi|^n).
double l2n_constant_map_ratio(const CutoffField& cutoff, int n);

struct CorpusSpec {
  int n = 2;               // grid dimension
  int ambient_dim = 3;
  double side = GridSpec::kDefaultSide;
  std::vector<int> resolutions{32, 64};
  int samples = 100;
  int max_freq = 1;        // 0 gives constant maps
  double beta = 0.0;
  double eps = 0.1;
  double radius = 0.0;     // cutoff radius; 0 means side / 4
  std::uint64_t seed = 1;
  std::vector<InequalityId> ids{std::begin(kAllInequalities), std::end(kAllInequalities)};
};

/// Sample k of the corpus at one resolution. Independent of the resolution
/// as a continuum map, so refinement studies compare like with like.
MapField corpus_sample(const CorpusSpec& spec, int res, int k);

struct CorpusRow {
  InequalityId id;
  int res;
  double max_ratio;
  double median_ratio;
  int samples;
  std::uint64_t seed;
};

struct CorpusSummary {
  std::vector<CorpusRow> rows;
  /// Inequalities whose max ratio more than doubled between consecutive
  /// resolutions, or produced a negative or non-finite ratio.
  std::vector<InequalityId> failures;
  bool ok() const { return failures.empty(); }
};

CorpusSummary corpus_scan(const CorpusSpec& spec);

/// CSV: id,res,max,median,samples,seed with 17 significant digits.
void write_corpus_csv(std::ostream& out, const CorpusSummary& summary);

}  // namespace nchf
