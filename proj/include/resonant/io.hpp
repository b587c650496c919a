#ifndef RESONANT_IO_HPP
#define RESONANT_IO_HPP

#include <string>

#include "resonant/pipeline.hpp"
#include "resonant/signal_model.hpp"

namespace resonant {

/// Dataset file, JSON schema version 1:
///   {version, T, num_classes, signals: [{label, re: [...], im: [...]}]}
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& ds, const std::string& path);

/// Model file, JSON schema version 1: a self-contained TrainedPipeline plus
/// the time-domain baseline trained on the same data (when present).
struct ModelBundle {
  TrainedPipeline pipeline;
  std::optional<TdBaseline> td_baseline;
};

void save_model(const ModelBundle& model, const std::string& path);
ModelBundle load_model(const std::string& path);

std::string kernel_to_string(const KernelSpec& k);
KernelSpec kernel_from_string(const std::string& text);

}  // namespace resonant

#endif  // RESONANT_IO_HPP
