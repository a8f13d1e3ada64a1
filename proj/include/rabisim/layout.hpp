#pragma once

// Mode bookkeeping for a truncated multi-mode Fock space.
// A layout is an ordered list of labeled modes with per-mode truncation
// dimensions; tensor order follows layout order (first mode varies slowest).

#include <algorithm>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabisim {

struct Mode {
  std::string label;
  int dim = 0;
};

class LayoutError : public std::runtime_error {
 public:
  explicit LayoutError(const std::string& what) : std::runtime_error(what) {}
};

class ModeLayout {
 public:
  ModeLayout() = default;

  ModeLayout(std::initializer_list<Mode> modes) : modes_(modes) { validate(); }

  explicit ModeLayout(std::vector<Mode> modes) : modes_(std::move(modes)) {
    validate();
  }

  int num_modes() const { return static_cast<int>(modes_.size()); }

  const std::vector<Mode>& modes() const { return modes_; }

  int dim(int i) const { return modes_.at(static_cast<size_t>(i)).dim; }

  int dim(const std::string& label) const { return modes_[index_of(label)].dim; }

  const std::string& label(int i) const {
    return modes_.at(static_cast<size_t>(i)).label;
  }

  bool has(const std::string& label) const {
    return std::any_of(modes_.begin(), modes_.end(),
                       [&](const Mode& m) { return m.label == label; });
  }

  size_t index_of(const std::string& label) const {
    for (size_t i = 0; i < modes_.size(); ++i) {
      if (modes_[i].label == label) return i;
    }
    throw LayoutError("no mode labeled '" + label + "' in layout");
  }

  long total_dim() const {
    long d = 1;
    for (const Mode& m : modes_) d *= m.dim;
    return d;
  }

  // Row-major strides: stride of the last mode is 1.
  std::vector<long> strides() const {
    std::vector<long> s(modes_.size(), 1);
    for (int i = num_modes() - 2; i >= 0; --i) {
      s[static_cast<size_t>(i)] =
          s[static_cast<size_t>(i) + 1] * modes_[static_cast<size_t>(i) + 1].dim;
    }
    return s;
  }

  long flat_index(const std::vector<int>& multi) const {
    if (multi.size() != modes_.size())
      throw LayoutError("multi-index rank does not match layout");
    long flat = 0;
    for (size_t i = 0; i < modes_.size(); ++i) {
      if (multi[i] < 0 || multi[i] >= modes_[i].dim)
        throw LayoutError("multi-index out of range for mode '" +
                          modes_[i].label + "'");
      flat = flat * modes_[i].dim + multi[i];
    }
    return flat;
  }

  std::vector<int> multi_index(long flat) const {
    std::vector<int> multi(modes_.size(), 0);
    for (int i = num_modes() - 1; i >= 0; --i) {
      const int d = modes_[static_cast<size_t>(i)].dim;
      multi[static_cast<size_t>(i)] = static_cast<int>(flat % d);
      flat /= d;
    }
    return multi;
  }

  // Layout with one mode removed (used after a detection contracts a mode).
  ModeLayout without(const std::string& label) const {
    std::vector<Mode> rest;
    rest.reserve(modes_.size());
    for (const Mode& m : modes_)
      if (m.label != label) rest.push_back(m);
    if (rest.size() == modes_.size())
      throw LayoutError("no mode labeled '" + label + "' in layout");
    return ModeLayout(rest);
  }

  // Sub-layout keeping the given labels, in this layout's order.
  ModeLayout subset(const std::vector<std::string>& labels) const {
    std::vector<Mode> kept;
    for (const Mode& m : modes_) {
      if (std::find(labels.begin(), labels.end(), m.label) != labels.end())
        kept.push_back(m);
    }
    if (kept.size() != labels.size())
      throw LayoutError("subset labels not all present in layout");
    return ModeLayout(kept);
  }

  ModeLayout concat(const ModeLayout& other) const {
    std::vector<Mode> all = modes_;
    all.insert(all.end(), other.modes_.begin(), other.modes_.end());
    return ModeLayout(all);
  }

  bool operator==(const ModeLayout& other) const {
    if (modes_.size() != other.modes_.size()) return false;
    for (size_t i = 0; i < modes_.size(); ++i) {
      if (modes_[i].label != other.modes_[i].label ||
          modes_[i].dim != other.modes_[i].dim)
        return false;
    }
    return true;
  }

 private:
  void validate() const {
    for (size_t i = 0; i < modes_.size(); ++i) {
      if (modes_[i].dim < 2)
        throw LayoutError("mode '" + modes_[i].label +
                          "' must have dimension >= 2");
      for (size_t j = i + 1; j < modes_.size(); ++j) {
        if (modes_[i].label == modes_[j].label)
          throw LayoutError("duplicate mode label '" + modes_[i].label + "'");
      }
    }
  }

  std::vector<Mode> modes_;
};

}  // namespace rabisim
