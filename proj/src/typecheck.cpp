#include "ielc/typecheck.hpp"

#include <sstream>
#include <stdexcept>

#include "ielc/parser.hpp"

namespace ielc {

namespace {

TypingError unbound(std::string name, TermPtr at) {
  return TypingError{TypeErrorKind::UnboundVariable, std::move(name),
                     nullptr,  nullptr,
                     std::move(at), 0, 0};
}

Result<TypePtr, TypingError> infer_impl(const Context& ctx, const TermPtr& t) {
  if (auto* n = as<Var>(t)) {
    if (const TypePtr* ty = ctx.lookup(n->name)) return *ty;
    return unbound(n->name, t);
  }
  if (auto* n = as<Lam>(t)) {
    if (!n->annot)
      return TypingError{TypeErrorKind::MissingAnnotation, n->binder, nullptr,
                         nullptr, t, 0, 0};
    if (ctx.contains(n->binder))
      return TypingError{TypeErrorKind::DuplicateBinding, n->binder, nullptr,
                         nullptr, t, 0, 0};
    Context inner = ctx;
    inner.decls.emplace_back(n->binder, n->annot);
    auto body = infer_impl(inner, n->body);
    if (!body) return body;
    return arrow(n->annot, body.value());
  }
  if (auto* n = as<App>(t)) {
    auto fn = infer_impl(ctx, n->fn);
    if (!fn) return fn;
    auto* arr = as<TArrow>(fn.value());
    if (!arr)
      return TypingError{TypeErrorKind::NotAFunction, "", nullptr, fn.value(),
                         n->fn, 0, 0};
    auto arg = infer_impl(ctx, n->arg);
    if (!arg) return arg;
    if (!type_eq(arr->dom, arg.value()))
      return TypingError{TypeErrorKind::Mismatch, "", arr->dom, arg.value(),
                         n->arg, 0, 0};
    return arr->cod;
  }
  if (auto* n = as<Pair>(t)) {
    auto a = infer_impl(ctx, n->first);
    if (!a) return a;
    auto b = infer_impl(ctx, n->second);
    if (!b) return b;
    return product(a.value(), b.value());
  }
  if (auto* n = as<Proj>(t)) {
    auto a = infer_impl(ctx, n->body);
    if (!a) return a;
    auto* prod = as<TProduct>(a.value());
    if (!prod)
      return TypingError{TypeErrorKind::NotAProduct, "", nullptr, a.value(),
                         n->body, 0, 0};
    return n->index == 1 ? prod->left : prod->right;
  }
  if (auto* n = as<Pure>(t)) {
    auto a = infer_impl(ctx, n->body);
    if (!a) return a;
    return circle(a.value());
  }
  auto* n = as<LetCirc>(t);
  if (n->binders.size() != n->args.size())
    return TypingError{TypeErrorKind::ArityMismatch, "", nullptr, nullptr, t,
                       n->binders.size(), n->args.size()};
  Context body_ctx;  // the rule types the body under the binders alone
  for (std::size_t i = 0; i < n->args.size(); ++i) {
    auto a = infer_impl(ctx, n->args[i]);
    if (!a) return a;
    auto* circ_ty = as<TCircle>(a.value());
    if (!circ_ty)
      return TypingError{TypeErrorKind::NotModal, "", nullptr, a.value(),
                         n->args[i], 0, 0};
    if (body_ctx.contains(n->binders[i]))
      return TypingError{TypeErrorKind::DuplicateBinding, n->binders[i],
                         nullptr, nullptr, t, 0, 0};
    body_ctx.decls.emplace_back(n->binders[i], circ_ty->body);
  }
  auto body = infer_impl(body_ctx, n->body);
  if (!body) return body;
  return circle(body.value());
}

}  // namespace

Result<TypePtr, TypingError> infer(const Context& ctx, const TermPtr& t) {
  return infer_impl(ctx, t);
}

Result<bool, TypingError> check(const Context& ctx, const TermPtr& t,
                                const TypePtr& ty) {
  auto got = infer(ctx, t);
  if (!got) return got.error();
  if (!type_eq(got.value(), ty))
    return TypingError{TypeErrorKind::Mismatch, "", ty, got.value(), t, 0, 0};
  return true;
}

bool generation_pure(const Context& ctx, const TermPtr& t) {
  auto* p = as<Pure>(t);
  if (!p) throw std::invalid_argument("generation_pure: not a pure term");
  auto ty = infer(ctx, t);
  if (!ty || !as<TCircle>(ty.value()))
    throw std::invalid_argument("generation_pure: term has no modal type");
  auto inner = infer(ctx, p->body);
  return inner.ok() && type_eq(inner.value(), as<TCircle>(ty.value())->body);
}

std::string describe(const TypingError& e) {
  std::ostringstream os;
  switch (e.kind) {
    case TypeErrorKind::UnboundVariable:
      os << "unbound variable '" << e.name << "'";
      break;
    case TypeErrorKind::Mismatch:
      os << "expected type " << print_type(e.expected) << " but found "
         << print_type(e.found);
      break;
    case TypeErrorKind::NotAFunction:
      os << "not a function: type " << print_type(e.found);
      break;
    case TypeErrorKind::NotAProduct:
      os << "not a product: type " << print_type(e.found);
      break;
    case TypeErrorKind::NotModal:
      os << "let argument is not modal: type " << print_type(e.found);
      break;
    case TypeErrorKind::ArityMismatch:
      os << "let binds " << e.expected_count << " names but has "
         << e.found_count << " arguments";
      break;
    case TypeErrorKind::DuplicateBinding:
      os << "duplicate binding '" << e.name << "'";
      break;
    case TypeErrorKind::MissingAnnotation:
      os << "lambda binder '" << e.name << "' lacks a type annotation";
      break;
  }
  if (e.at) {
    os << " in `" << print_term(e.at) << "`";
    if (e.at->span.end > e.at->span.start)
      os << " at " << e.at->span.line << ":" << e.at->span.column;
  }
  return os.str();
}

}  // namespace ielc
