#include "cogal/translate.hpp"

#include <algorithm>

namespace cogal {

namespace {

Formula imp(Formula l, Formula r) { return neg(conj(std::move(l), neg(std::move(r)))); }

std::size_t complexity(const Formula& f) {
    switch (f.op()) {
        case Op::Atom:
        case Op::Top: return 1;
        case Op::Not:
        case Op::Know: return 1 + complexity(f.arg(0));
        case Op::And: return 1 + std::max(complexity(f.arg(0)), complexity(f.arg(1)));
        case Op::PaBox: return (4 + complexity(f.arg(0))) * complexity(f.arg(1));
        default: throw TranslateError("formula outside the public announcement fragment");
    }
}

// `bound` is the complexity of the caller's argument; every call checks that
// it strictly decreases.
Formula t(const Formula& f, std::size_t bound) {
    const std::size_t c = complexity(f);
    if (c >= bound) throw std::logic_error("translate: complexity did not decrease");
    switch (f.op()) {
        case Op::Atom:
        case Op::Top: return f;
        case Op::Not: return neg(t(f.arg(0), c));
        case Op::And: return conj(t(f.arg(0), c), t(f.arg(1), c));
        case Op::Know: return know(f.name(), t(f.arg(0), c));
        case Op::PaBox: break;
        default: throw TranslateError("formula outside the public announcement fragment");
    }
    const Formula& ann = f.arg(0);
    const Formula& body = f.arg(1);
    switch (body.op()) {
        case Op::Atom:
        case Op::Top: return imp(t(ann, c), body);
        case Op::Not: return imp(t(ann, c), neg(t(announce(ann, body.arg(0)), c)));
        case Op::And: return conj(t(announce(ann, body.arg(0)), c), t(announce(ann, body.arg(1)), c));
        case Op::Know: return imp(t(ann, c), know(body.name(), t(announce(ann, body.arg(0)), c)));
        case Op::PaBox: return t(announce(conj(ann, announce(ann, body.arg(0))), body.arg(1)), c);
        default: throw TranslateError("formula outside the public announcement fragment");
    }
}

}  // namespace

Formula translate(const Formula& f) {
    const Fragment fr = fragment(f);
    if (fr != Fragment::EL && fr != Fragment::PAL)
        throw TranslateError(std::string("cannot translate a ") + std::string(fragment_name(fr)) + " formula");
    const Formula n = normalize(f);
    return t(n, complexity(n) + 1);
}

std::size_t translation_complexity(const Formula& f) { return complexity(normalize(f)); }

}  // namespace cogal
