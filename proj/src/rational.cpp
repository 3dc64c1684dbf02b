#include "sandpile/rational.hpp"

#include <stdexcept>

namespace sandpile {

std::string rat_to_string(const Rat& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::domain_error("rat_from_string: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        return Rat(num, den);
    } catch (const std::runtime_error&) {
        throw std::domain_error("rat_from_string: malformed rational '" + s + "'");
    }
}

}  // namespace sandpile
