#pragma once

#include <string>
#include <string_view>

namespace abm {

// SHA-1 hex digest of a byte string.
std::string sha1_hex(std::string_view bytes);

// Git-style blob hash: sha1("blob <size>\0" + bytes).
std::string git_blob_hash(std::string_view bytes);

}  // namespace abm
