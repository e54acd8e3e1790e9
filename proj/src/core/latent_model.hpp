#pragma once

#include <memory>

#include "types.hpp"

namespace softshape {

/// Feature space a latent model was fit on. Traces and rendering use it to
/// turn decoded feature vectors back into displayable 3D points.
struct FeatureSpace {
    enum class Kind { MarkerRaw, Fourier, CloudRaw };
    Kind kind = Kind::MarkerRaw;
    int q = 0;           // marker count (MarkerRaw / Fourier source)
    int harmonics = 0;   // Fourier
    int resolution = 0;  // CloudRaw

    int dim() const;
    bool ordered() const { return kind != Kind::CloudRaw; }
    std::string name() const;
    static FeatureSpace marker_raw(int q);
    static FeatureSpace fourier(int q, int harmonics);
    static FeatureSpace cloud_raw(int resolution);
};

/// Generator g: Z -> X with exact Jacobian access. The geodesic machinery
/// works against this interface; analytic test manifolds implement it
/// directly.
class Decoder {
public:
    virtual ~Decoder() = default;
    virtual int latent_dim() const = 0;
    virtual int ambient_dim() const = 0;
    virtual Vector decode(const Vector& z) const = 0;
    /// ambient_dim x latent_dim
    virtual Matrix decoder_jacobian(const Vector& z) const = 0;
    virtual bool is_linear() const = 0;
};

/// Invertible dimensionality transformation: encoder h plus generator g with
/// the feature-space bookkeeping shared by PCA and autoencoder models.
/// decode() maps into the model's native ambient space (normalized features
/// for sigmoid-output autoencoders); reconstruct() undoes the normalization.
class LatentModel : public Decoder {
public:
    virtual Vector encode(const Vector& raw_features) const = 0;
    virtual Vector reconstruct(const Vector& z) const = 0;
    virtual const FeatureSpace& feature_space() const = 0;
    virtual const NormalizationRecord& normalization() const = 0;
    virtual std::string kind() const = 0;  // "pca" | "autoencoder"
};

}  // namespace softshape
