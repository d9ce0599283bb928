#include "densalg/coordinate_change.hpp"

namespace densalg {

namespace {

std::vector<Parity> chart_parities(const ChartPtr& c) {
  std::vector<Parity> p;
  for (int i = 0; i < c->size(); ++i) p.push_back(c->parity(i));
  return p;
}

}  // namespace

CoordinateChange::CoordinateChange(ChartPtr source, ChartPtr target,
                                   std::vector<GradedScalar> forward,
                                   std::optional<std::vector<GradedScalar>> inverse)
    : source_(std::move(source)),
      target_(std::move(target)),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      jacobian_(source_, chart_parities(target_), chart_parities(source_)),
      ber_(source_) {
  if (static_cast<int>(forward_.size()) != target_->size())
    throw Error(Error::Code::bad_argument, "forward image count must match target chart");
  for (int t = 0; t < target_->size(); ++t) {
    if (forward_[static_cast<size_t>(t)].chart() != source_)
      throw Error(Error::Code::chart_mismatch, "forward image must live over the source chart");
    if (!forward_[static_cast<size_t>(t)].is_homogeneous(target_->parity(t)))
      throw Error(Error::Code::parity_mismatch, "forward image parity mismatch");
  }

  for (int t = 0; t < target_->size(); ++t)
    for (int s = 0; s < source_->size(); ++s)
      jacobian_.at(t, s) = forward_[static_cast<size_t>(t)].partial(s);
  ber_ = berezinian(jacobian_);
  if (ber_.body().is_zero())
    throw Error(Error::Code::non_invertible, "Jacobian Berezinian has vanishing body");

  if (inverse_) {
    if (static_cast<int>(inverse_->size()) != source_->size())
      throw Error(Error::Code::bad_argument, "inverse image count must match source chart");
    for (int s = 0; s < source_->size(); ++s) {
      if ((*inverse_)[static_cast<size_t>(s)].chart() != target_)
        throw Error(Error::Code::chart_mismatch, "inverse image must live over the target chart");
      if (!(*inverse_)[static_cast<size_t>(s)].is_homogeneous(source_->parity(s)))
        throw Error(Error::Code::parity_mismatch, "inverse image parity mismatch");
    }
    // forward then inverse must restore the coordinates on both sides
    for (int t = 0; t < target_->size(); ++t) {
      GradedScalar back = forward_[static_cast<size_t>(t)].substitute(*inverse_, target_);
      if (!(back == GradedScalar::coordinate(target_, t)))
        throw Error(Error::Code::bad_argument,
                    "forward/inverse do not compose to the identity on " + target_->name(t));
    }
    for (int s = 0; s < source_->size(); ++s) {
      GradedScalar back = (*inverse_)[static_cast<size_t>(s)].substitute(forward_, source_);
      if (!(back == GradedScalar::coordinate(source_, s)))
        throw Error(Error::Code::bad_argument,
                    "inverse/forward do not compose to the identity on " + source_->name(s));
    }
  }
}

GradedScalar CoordinateChange::pullback(const GradedScalar& f) const {
  if (f.chart() != target_)
    throw Error(Error::Code::chart_mismatch, "pullback expects a value over the target chart");
  return f.substitute(forward_, source_);
}

GradedScalar CoordinateChange::pushforward(const GradedScalar& f) const {
  if (!inverse_)
    throw Error(Error::Code::bad_argument, "pushforward requires an explicit inverse");
  if (f.chart() != source_)
    throw Error(Error::Code::chart_mismatch, "pushforward expects a value over the source chart");
  return f.substitute(*inverse_, target_);
}

}  // namespace densalg
