"""Passive Wi-Fi micro-Doppler activity recognition.

Simulate a reference/surveillance channel pair, extract the Doppler-time
history with a batched cross ambiguity function, align each motion to a
51x50 signature, reduce it with PCA and classify it by sparse
representation (with a linear SVM for comparison).
"""
from .align import (AlignedSignature, DetectionBounds, align_signature, bicubic_resize, crop,
                    detect_bounds, doppler_weights, normalize01, unvectorize, vectorize,
                    weighted_mean, weighted_std)
from .caf import CafConfig, CafSurface, DopplerSpectrogram, caf_batched, doppler_slice, spectrogram
from .classify import (Dictionary, SparseCode, SvmModel, build_dictionary, class_residual,
                       src_classify, subspace_pursuit, svm_classify, train_linear_svm)
from .errors import DatasetBuildError, InvalidArgument, NoMotionDetected
from .harness import (ClassificationReport, ExperimentConfig, build_dataset, build_datasets,
                      run_experiment, split_dataset)
from .pca import PcaModel, SignatureDataset, fit_pca, project
from .waveform import (ChannelPair, IqWaveform, MotionClass, MotionProfile, SceneConfig,
                       doppler_from_velocity, gen_wifi_baseband, motion_profile, simulate_channels)

__version__ = "0.1.0"
