#pragma once

#include <stdexcept>
#include <string>

namespace treequery {

/// Remote call failed at the HTTP layer (connect, timeout, non-2xx).
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An expert reply contained no extractable Yes/No conclusion.
/// Callers treat this as an abstention after the retry budget is spent.
class UnparseableAnswer : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace treequery
