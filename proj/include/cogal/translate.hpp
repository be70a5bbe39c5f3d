#ifndef COGAL_TRANSLATE_HPP
#define COGAL_TRANSLATE_HPP

#include <stdexcept>

#include "cogal/formula.hpp"

namespace cogal {

class TranslateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rewrites a public announcement formula into an equivalent epistemic one
/// by pushing announcements inward with the reduction clauses
///
///   [f]p -> (f -> p)            [f]~g -> (f -> ~[f]g)
///   [f](g & h) -> [f]g & [f]h   [f]K a g -> (f -> K a [f]g)
///   [f][g]h -> [f & [f]g]h
///
/// The input is normalized first; the result is in the primitive basis.
/// Throws TranslateError on group or coalition operators.
Formula translate(const Formula& f);

/// Termination measure of translate: 1 for atoms and top, +1 for ~ and K,
/// 1 + max for &, (4 + c(f)) * c(g) for [f]g.  Every recursive call of
/// translate is on a formula of strictly smaller complexity.
std::size_t translation_complexity(const Formula& f);

}  // namespace cogal

#endif  // COGAL_TRANSLATE_HPP
