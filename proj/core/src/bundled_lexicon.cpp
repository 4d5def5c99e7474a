#include <sstream>
#include <string>

#include "revmine/bundled_lexicon.hpp"
#include "revmine/textproc.hpp"

namespace revmine {

const Lexicon& bundled_lexicon() {
  static const Lexicon lexicon = [] {
    std::istringstream in{std::string(detail::kBundledLexiconTsv)};
    return Lexicon::from_stream(in, "bundled lexicon");
  }();
  return lexicon;
}

}  // namespace revmine
