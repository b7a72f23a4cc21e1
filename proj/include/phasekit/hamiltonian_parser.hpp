#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "polynomial.hpp"

namespace phasekit {

/// Parses a sum of operator products such as `ad a ad a` or `2 ad ad a a - ad a`.
///
/// Tokens are `ad` (creation), `a` (annihilation), integer coefficients and
/// the separators `+` / `-`. Each term is an optional integer followed by
/// ladder tokens; an integer with no tokens is a multiple of the identity.
inline std::vector<OperatorWord> parse_operator_words(const std::string& text) {
    std::string spaced;
    for (char ch : text) {
        if (ch == '+' || ch == '-' || ch == '*') {
            spaced += ' ';
            if (ch != '*') spaced += ch;
            spaced += ' ';
        } else {
            spaced += ch;
        }
    }

    std::vector<OperatorWord> words;
    OperatorWord current;
    bool have_content = false;
    bool have_coefficient = false;
    double sign = 1.0;

    auto flush = [&](const std::string& where) {
        if (!have_content) throw InvalidHamiltonian("empty term in Hamiltonian near '" + where + "'");
        current.coefficient *= sign;
        words.push_back(current);
        current = OperatorWord{};
        have_content = false;
        have_coefficient = false;
        sign = 1.0;
    };

    std::istringstream in(spaced);
    std::string tok;
    bool dangling = false;
    while (in >> tok) {
        if (tok == "+" || tok == "-") {
            if (have_content) flush(tok);
            if (tok == "-") sign = -sign;
            dangling = true;
            continue;
        }
        if (tok == "ad") {
            current.factors.push_back(Ladder::creation);
        } else if (tok == "a") {
            current.factors.push_back(Ladder::annihilation);
        } else if (std::isdigit(static_cast<unsigned char>(tok.front()))) {
            if (have_coefficient || !current.factors.empty())
                throw InvalidHamiltonian("coefficient must lead its term: '" + tok + "'");
            for (char ch : tok)
                if (!std::isdigit(static_cast<unsigned char>(ch)))
                    throw InvalidHamiltonian("coefficients must be integers: '" + tok + "'");
            current.coefficient = std::stod(tok);
            have_coefficient = true;
        } else {
            throw InvalidHamiltonian("unknown token '" + tok + "' (expected ad, a, integer, + or -)");
        }
        have_content = true;
        dangling = false;
    }
    if (have_content)
        flush("end");
    else if (dangling)
        throw InvalidHamiltonian("Hamiltonian ends with a dangling operator sign");
    if (words.empty()) throw InvalidHamiltonian("empty Hamiltonian");
    return words;
}

/// Normal-ordered symbol of the parsed Hamiltonian.
inline Polynomial parse_hamiltonian(const std::string& text) {
    return normal_order(parse_operator_words(text));
}

}  // namespace phasekit
