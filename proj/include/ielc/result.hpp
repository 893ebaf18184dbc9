#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace ielc {

// Minimal expected-like sum for operations whose failure is a domain
// outcome rather than a programming error.
template <class T, class E>
class Result {
 public:
  Result(T v) : v_(std::in_place_index<0>, std::move(v)) {}
  Result(E e) : v_(std::in_place_index<1>, std::move(e)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const {
    if (!ok()) throw std::logic_error("Result::value on error");
    return std::get<0>(v_);
  }
  const E& error() const {
    if (ok()) throw std::logic_error("Result::error on value");
    return std::get<1>(v_);
  }
  T&& take() && {
    if (!ok()) throw std::logic_error("Result::take on error");
    return std::get<0>(std::move(v_));
  }

 private:
  std::variant<T, E> v_;
};

}  // namespace ielc
