#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace teachlab {

struct GradCheckCase {
    std::string name;
    double rel_err = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckCase> cases;
    double max_rel_err = 0.0;
    std::string worst_case;

    bool pass(double tol = 1e-4) const { return max_rel_err < tol; }
};

/// Central finite differences (h = 1e-5) against the reverse-mode gradients,
/// for every registered op on randomized small inputs and for both full model
/// variants at tiny dims. The oracle side re-evaluates forward passes only,
/// independent of the backward implementation it checks. Relative error uses
/// |ad - fd| / max(|ad|, |fd|, 1).
GradCheckReport run_gradcheck(std::uint64_t seed);

}  // namespace teachlab
