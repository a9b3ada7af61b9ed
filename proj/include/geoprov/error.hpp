#pragma once

#include <stdexcept>
#include <string>

namespace geoprov {

// Base class for all errors raised by the library. `code()` is the stable
// machine-readable identifier used in API error payloads.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define GEOPROV_DEFINE_ERROR(Name, code_str)                          \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& message) : Error(code_str, message) {} \
  }

GEOPROV_DEFINE_ERROR(MalformedArticleUrl, "malformed_article_url");
GEOPROV_DEFINE_ERROR(ArticleNotFound, "article_not_found");
// Network or upstream API failure. Retryable.
GEOPROV_DEFINE_ERROR(UpstreamUnavailable, "upstream_unavailable");
GEOPROV_DEFINE_ERROR(NotFound, "not_found");
GEOPROV_DEFINE_ERROR(DegenerateClassPair, "degenerate_class_pair");
GEOPROV_DEFINE_ERROR(InsufficientClasses, "insufficient_classes");
GEOPROV_DEFINE_ERROR(ModelFormatError, "model_format_error");
GEOPROV_DEFINE_ERROR(TooFewExamples, "too_few_examples");
GEOPROV_DEFINE_ERROR(CacheCorrupt, "cache_corrupt");
GEOPROV_DEFINE_ERROR(DataFormatError, "data_format_error");
GEOPROV_DEFINE_ERROR(InvalidArgument, "invalid_argument");

#undef GEOPROV_DEFINE_ERROR

}  // namespace geoprov
