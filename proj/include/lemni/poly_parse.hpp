#pragma once

#include <cctype>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lemni/error.hpp"
#include "lemni/polynomial.hpp"

namespace lemni {

/// Parses sums of terms c*z^k, e.g. "z^2-4", "10z", "-2 z^3 + z - 1".
/// The coefficient and '*' are optional, as is "^k" after z. Repeated powers
/// add up. Coefficients are real decimal numbers.
inline ComplexPolynomial parse_polynomial(std::string_view text) {
    std::string s;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    }
    if (s.empty()) throw InvalidArgument("empty polynomial");
    std::map<int, double> terms;
    std::size_t i = 0;
    auto fail = [&](const std::string& why) {
        throw InvalidArgument("cannot parse polynomial '" + std::string(text) + "': " + why);
    };
    bool first = true;
    while (i < s.size()) {
        double sign = 1.0;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1.0 : 1.0;
            ++i;
        } else if (!first) {
            fail("expected + or -");
        }
        first = false;
        double coef = 1.0;
        bool has_coef = false;
        if (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
            const char* start = s.c_str() + i;
            char* end = nullptr;
            coef = std::strtod(start, &end);
            if (end == start) fail("bad number");
            i += static_cast<std::size_t>(end - start);
            has_coef = true;
        }
        int power = 0;
        if (i < s.size() && s[i] == '*') {
            if (!has_coef) fail("'*' without coefficient");
            ++i;
            if (i >= s.size() || s[i] != 'z') fail("expected z after '*'");
        }
        if (i < s.size() && s[i] == 'z') {
            ++i;
            power = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                std::size_t j = i;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                if (j == i) fail("expected exponent");
                power = std::stoi(s.substr(i, j - i));
                i = j;
            }
        } else if (!has_coef) {
            fail("expected a term");
        }
        terms[power] += sign * coef;
    }
    int degree = terms.rbegin()->first;
    while (degree > 0 && terms[degree] == 0.0) --degree;
    std::vector<Complex> c(static_cast<std::size_t>(degree) + 1, Complex{0.0, 0.0});
    for (const auto& [k, v] : terms) {
        if (k <= degree) c[static_cast<std::size_t>(k)] = v;
    }
    return ComplexPolynomial(std::move(c));
}

}  // namespace lemni
