#include "otfsim/frame.hpp"

#include <stdexcept>

namespace otfsim {

void FrameParams::validate() const {
    if (M < 1 || N < 1) throw std::invalid_argument("FrameParams: M and N must be >= 1");
    if (delta_f <= 0.0) throw std::invalid_argument("FrameParams: delta_f must be > 0");
    if (f_c <= 0.0) throw std::invalid_argument("FrameParams: f_c must be > 0");
    if (E < 1) throw std::invalid_argument("FrameParams: E must be >= 1");
    if (eta <= 0.0) throw std::invalid_argument("FrameParams: eta must be > 0");
    if (cp_len < 0) throw std::invalid_argument("FrameParams: cp_len must be >= 0");
}

FrameParams make_params(int M, int N, double delta_f, double f_c, int E,
                        double eta_over_lambda, int cp_len) {
    FrameParams p;
    p.M = M;
    p.N = N;
    p.delta_f = delta_f;
    p.f_c = f_c;
    p.E = E;
    p.eta = eta_over_lambda * (kSpeedOfLight / f_c);
    p.cp_len = cp_len;
    p.validate();
    return p;
}

}  // namespace otfsim
