#ifndef MCPAD_ERRORS_HPP
#define MCPAD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcpad {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string &msg) : std::runtime_error(msg) {}
};

// Bad or out-of-range configuration (CLI exit code 2).
class config_error : public error {
 public:
  explicit config_error(const std::string &msg) : error(msg) {}
};

// Missing files, splits, or dataset layout problems (CLI exit code 3).
class data_error : public error {
 public:
  explicit data_error(const std::string &msg) : error(msg) {}
};

// Corrupt or unreadable frame/model content (CLI exit code 4).
class corrupt_input_error : public error {
 public:
  explicit corrupt_input_error(const std::string &msg) : error(msg) {}
};

// A metric is undefined for the given inputs, e.g. APCER of an empty
// attack set (CLI exit code 5).
class metric_error : public error {
 public:
  explicit metric_error(const std::string &msg) : error(msg) {}
};

// Planes of differing sizes where identical dimensions are required.
class dimension_mismatch_error : public error {
 public:
  explicit dimension_mismatch_error(const std::string &msg) : error(msg) {}
};

// Decoded or constructed box with a non-positive side.
class invalid_box_error : public error {
 public:
  explicit invalid_box_error(const std::string &msg) : error(msg) {}
};

// Anchor whose pixel support does not intersect the image.
class degenerate_anchor_error : public error {
 public:
  explicit degenerate_anchor_error(const std::string &msg) : error(msg) {}
};

// Training set without a single positive anchor.
class unlearnable_dataset_error : public error {
 public:
  explicit unlearnable_dataset_error(const std::string &msg) : error(msg) {}
};

}  // namespace mcpad

#endif  // MCPAD_ERRORS_HPP
