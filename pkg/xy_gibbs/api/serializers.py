import math

import numpy as np
from rest_framework import serializers

from xy_gibbs.models import (
    AncillaMode, ModelParams, OptimizerKind, OutputFormat, SweepSpec, VqaConfig,
)
from xy_gibbs.utils import simulator


class Float17Field(serializers.FloatField):
    """Float output; NaN and infinities become null so the JSON stays strict."""

    def to_representation(self, value):
        value = float(value)
        return value if math.isfinite(value) else None


def _floats(values):
    return [Float17Field().to_representation(v) for v in np.asarray(values, dtype=float).reshape(-1)]


# ---------------------------------------------------------------------------
# Input payloads
# ---------------------------------------------------------------------------

class ModelParamsSerializer(serializers.Serializer):
    """XY chain parameters; ``h`` maps onto ModelParams.field_h."""
    n_sites = serializers.IntegerField(min_value=2)
    gamma = Float17Field()
    h = Float17Field(source='field_h')

    def validate_n_sites(self, value):
        """N must be even."""
        if value % 2:
            raise serializers.ValidationError(f"N must be even, got {value}")
        return value

    def create(self, validated_data):
        return ModelParams(**validated_data)


class RunOptionsSerializer(serializers.Serializer):
    """Optimizer options shared by single runs and sweeps."""
    ancilla_mode = serializers.ChoiceField(choices=AncillaMode.choices, default=AncillaMode.FULL_GR)
    system_layers = serializers.IntegerField(min_value=1, required=False)
    ancilla_layers = serializers.IntegerField(min_value=1, required=False)
    restarts = serializers.IntegerField(min_value=1, required=False)
    optimizer = serializers.ChoiceField(choices=OptimizerKind.choices, default=OptimizerKind.QUASI_NEWTON)
    max_iterations = serializers.IntegerField(min_value=1, required=False)
    gradient_step = serializers.FloatField(required=False)
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate_gradient_step(self, value):
        if not (math.isfinite(value) and value > 0):
            raise serializers.ValidationError("gradient step must be a positive number")
        return value

    def _run_options(self, data):
        names = (
            'ancilla_mode', 'system_layers', 'ancilla_layers', 'restarts', 'optimizer',
            'max_iterations', 'gradient_step', 'seed',
        )
        return {name: data[name] for name in names if data.get(name) is not None}


def _check_beta(value):
    if not (math.isfinite(value) and value > 0):
        raise serializers.ValidationError(f"beta must be a finite positive number, got {value}")
    return value


class VqaConfigSerializer(RunOptionsSerializer):
    """
    Validates one VQA run and builds the VqaConfig. Also used to echo the
    configuration inside result documents.
    """
    model = ModelParamsSerializer()
    beta = Float17Field()
    energy_tolerance = Float17Field(read_only=True)
    gradient_tolerance = Float17Field(read_only=True)

    def validate_beta(self, value):
        return _check_beta(value)

    def validate(self, data):
        """The reduced ancilla ansatz only exists for N = 4."""
        if data.get('ancilla_mode') == AncillaMode.REDUCED_XY and data['model']['n_sites'] != 4:
            raise serializers.ValidationError({'ancilla_mode': "reduced_xy requires N = 4"})
        return data

    def create(self, validated_data):
        model = ModelParams(**validated_data['model'])
        return VqaConfig(model=model, beta=validated_data['beta'], **self._run_options(validated_data))


class SweepSpecSerializer(RunOptionsSerializer):
    n_sites = serializers.IntegerField(min_value=2)
    gammas = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    hs = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    betas = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    output = serializers.CharField(required=False, allow_null=True, default=None)
    format = serializers.ChoiceField(choices=[OutputFormat.CSV, OutputFormat.JSON], default=OutputFormat.CSV)
    jobs = serializers.IntegerField(min_value=1, default=1)

    def validate_n_sites(self, value):
        if value % 2:
            raise serializers.ValidationError(f"N must be even, got {value}")
        return value

    def validate_betas(self, value):
        """Every inverse temperature must be positive."""
        return [_check_beta(beta) for beta in value]

    def validate(self, data):
        if data.get('ancilla_mode') == AncillaMode.REDUCED_XY and data['n_sites'] != 4:
            raise serializers.ValidationError({'ancilla_mode': "reduced_xy requires N = 4"})
        return data

    def create(self, validated_data):
        template = VqaConfig(
            model=ModelParams(validated_data['n_sites'], validated_data['gammas'][0], validated_data['hs'][0]),
            beta=validated_data['betas'][0],
            **self._run_options(validated_data),
        )
        return SweepSpec(
            betas=tuple(validated_data['betas']),
            gammas=tuple(validated_data['gammas']),
            hs=tuple(validated_data['hs']),
            template=template,
            output_path=validated_data.get('output'),
            format=validated_data['format'],
            jobs=validated_data['jobs'],
        )


class DistributionSerializer(serializers.Serializer):
    """A probability vector read from a file for gr-angles."""
    probabilities = serializers.ListField(child=serializers.FloatField(), allow_empty=False)

    def validate_probabilities(self, value):
        size = len(value)
        if size < 2 or size & (size - 1):
            raise serializers.ValidationError(f"length must be a power of two >= 2, got {size}")
        if any(not math.isfinite(p) or p < 0 for p in value):
            raise serializers.ValidationError("entries must be finite and non-negative")
        if abs(math.fsum(value) - 1.0) > 1e-10:
            raise serializers.ValidationError(f"entries must sum to 1, got {math.fsum(value):.15g}")
        return value


# ---------------------------------------------------------------------------
# Output documents
# ---------------------------------------------------------------------------

class SectorLevelSerializer(serializers.Serializer):
    energy = Float17Field()
    occupation_mask = serializers.IntegerField()
    occupied_modes = serializers.ListField(child=Float17Field())


class SectorSpectrumSerializer(serializers.Serializer):
    parity = serializers.CharField()
    n_sites = serializers.IntegerField()
    momenta = serializers.SerializerMethodField()
    ground_energy = Float17Field()
    levels = SectorLevelSerializer(many=True)

    def get_momenta(self, obj):
        return _floats(obj.momenta.momenta)


class DegeneracyProfileSerializer(serializers.Serializer):
    n_sites = serializers.IntegerField()
    n_fermions = serializers.IntegerField()
    counts = serializers.SerializerMethodField()
    total_levels = serializers.IntegerField()
    expected_total = serializers.IntegerField()

    def get_counts(self, obj):
        return [{'degree': degree, 'count': count} for degree, count in sorted(obj.counts.items())]


class GRAnglesSerializer(serializers.Serializer):
    n_qubits = serializers.IntegerField()
    thetas = serializers.SerializerMethodField()

    def get_thetas(self, obj):
        return [
            {'index': i, 'label': f'theta_{i}', 'value': value}
            for i, value in enumerate(_floats(obj.thetas))
        ]


class ReducedFitReportSerializer(serializers.Serializer):
    model = ModelParamsSerializer(source='params')
    beta = Float17Field()
    angles = GRAnglesSerializer()
    residuals = serializers.SerializerMethodField()
    max_residual = Float17Field()
    reduced_free_angles = serializers.SerializerMethodField()
    reconstruction_error = Float17Field()

    def get_residuals(self, obj):
        tolerance = self.context.get('tolerance', 1e-9)
        holds = obj.holds(tolerance)
        return [
            {'identity': name, 'residual': Float17Field().to_representation(value), 'holds': holds[name]}
            for name, value in obj.residuals.items()
        ]

    def get_reduced_free_angles(self, obj):
        return None if obj.reduced is None else _floats(obj.reduced.free)


class GibbsTargetSerializer(serializers.Serializer):
    model = ModelParamsSerializer(source='params')
    beta = Float17Field()
    energies = serializers.SerializerMethodField()
    probabilities = serializers.SerializerMethodField()
    log_partition_function = Float17Field()
    free_energy = serializers.SerializerMethodField()
    energy = Float17Field()
    entropy = Float17Field()
    density_matrix = serializers.SerializerMethodField()

    def get_energies(self, obj):
        return _floats(obj.energies)

    def get_probabilities(self, obj):
        return _floats(obj.probabilities)

    def get_free_energy(self, obj):
        return Float17Field().to_representation(obj.free_energy) if obj.beta > 0 else None

    def get_density_matrix(self, obj):
        return [_floats(row) for row in np.real(obj.density_matrix.matrix)]


class RestartRecordSerializer(serializers.Serializer):
    index = serializers.IntegerField()
    free_energy = Float17Field()
    fidelity = Float17Field()
    iterations = serializers.IntegerField()
    converged = serializers.BooleanField()
    diverged = serializers.BooleanField()
    message = serializers.CharField()


class VqaResultSerializer(serializers.Serializer):
    """Result document without the wall-clock time, so reruns are byte-identical."""
    config = VqaConfigSerializer()
    best_free_energy = Float17Field()
    exact_free_energy = Float17Field()
    fidelity = Float17Field()
    best_restart = serializers.IntegerField()
    max_fidelity = Float17Field()
    max_fidelity_restart = serializers.IntegerField()
    converged_restarts = serializers.IntegerField()
    optimal_thetas = serializers.SerializerMethodField()
    optimal_phis = serializers.SerializerMethodField()
    prepared_state_spectrum = serializers.SerializerMethodField()
    per_restart_log = RestartRecordSerializer(many=True)

    def get_optimal_thetas(self, obj):
        return _floats(obj.optimal_thetas)

    def get_optimal_phis(self, obj):
        return _floats(obj.optimal_phis)

    def get_prepared_state_spectrum(self, obj):
        return _floats(np.sort(obj.prepared_state.eigenvalues())[::-1])


class SweepRowSerializer(serializers.Serializer):
    beta = Float17Field()
    gamma = Float17Field()
    h = Float17Field()
    fidelity_best = Float17Field(allow_null=True)
    free_energy_best = Float17Field(allow_null=True)
    exact_free_energy = Float17Field(allow_null=True)
    restarts = serializers.IntegerField()
    wall_time = Float17Field()
    status = serializers.CharField()
    error = serializers.CharField(allow_blank=True)


class StatevectorSerializer(serializers.Serializer):
    """Debug dump of a statevector as (index, re, im) rows."""
    n_qubits = serializers.IntegerField()
    amplitudes = serializers.SerializerMethodField()

    def get_amplitudes(self, obj):
        return simulator.dump_statevector(obj)
