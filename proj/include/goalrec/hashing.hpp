#pragma once

#include <string>
#include <string_view>

namespace goalrec {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Git blob object id: SHA-1 over "blob <size>\0" followed by the content.
std::string git_blob_id(std::string_view content);

}  // namespace goalrec
