"""Walsh-basis reconstruction of time-varying fields with a qubit sensor."""
from .walsh import (Ordering, PulseSequence, WalshIndex, convert_ordering, cpmg_indices, degree,
                    fwht, gray_code, ifwht, inverse_gray_code, pdd_indices, pulse_sequence_from_walsh,
                    rademacher_eval, walsh_eval, zero_crossings)
from .profiles import (CORPUS, FieldProfile, Provenance, WalshSpectrum, named_profile, partial_sum,
                       walsh_coefficient, walsh_spectrum)
from .negligibility import (coefficient_bound, contrast, local_minima_negligibility,
                            maximal_contrast_at_degree, rank, subdegree, threshold_search)
from .compression import (CompressionPlan, ErrorReport, Method, msqe, plan_indices, reconstruct,
                          subdegree_error_bound, truncation_bound)
from .sensor import (MeasurementRecord, SensorConfig, VisibilityModel, accumulated_phase,
                     estimate_coefficient, outcome_probability, run_protocol, simulate_shots)
from .stats import (ReconstructionEnvelope, coefficient_std, envelope, fisher_information,
                    sensitivity, total_error_report)
from .ddfilter import NoiseSpectrum, annihilation_check, coherence_decay, filter_function, rolloff

__version__ = "0.1.0"
