#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nfa {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<std::string> details;  // one line per sub-check
    double seconds = 0;
};

// Runs acceptance criteria 1-10 (or only `only` when nonzero), writing one
// PASS/FAIL line per criterion to `out` as each completes.
std::vector<CriterionResult> run_acceptance(std::ostream& out, int only = 0);

}  // namespace nfa
