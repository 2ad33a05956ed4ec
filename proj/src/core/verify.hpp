#pragma once

#include <string>
#include <vector>

namespace nsp {

struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double elapsed_seconds = 0.0;
};

/// Suites: q-residual, determinant, tree-oracle, scaling, lemma1, lemma4,
/// measure, symmetry, jacobian, all. Unknown names throw std::invalid_argument.
std::vector<CriterionResult> run_suite(const std::string& suite);

std::string format_results(const std::vector<CriterionResult>& results);
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace nsp
