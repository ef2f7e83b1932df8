#include "matchstat/bigreal.hpp"

#include <cstdio>
#include <vector>

namespace matchstat {

std::string BigReal::to_string() const {
    // prec * log10(2) digits plus two guard digits round-trips binary->decimal->binary.
    int digits = static_cast<int>(static_cast<double>(prec()) * 0.30103) + 2;
    return to_string(digits);
}

std::string BigReal::to_string(int digits) const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    char* s = nullptr;
    if (mpfr_asprintf(&s, "%.*Rg", digits, v_) < 0) return "nan";
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

}  // namespace matchstat
