"""key=value run configuration parsing.

The format is flat UTF-8 ``key = value`` lines; ``#`` starts a comment and
``[section]`` headers are allowed as visual grouping.  Unknown keys, values
out of range, and a missing epsilon for the eps-model are rejected with the
offending key named.
"""

from .axial import PotentialSpec
from .evolve import MODELS, SIGMAS, SimConfig

_FLOAT_KEYS = {
    "epsilon", "dt", "t_final", "l_z", "kappa", "v_amplitude", "amplitude",
    "zmod_k", "zmod_mix", "zmod_wave", "ref_dt", "t_dyadic", "smallness_delta",
    "commute_t", "sample_interval",
}
_INT_KEYS = {
    "sigma", "lambda", "cutoff", "node_count", "n_z", "n_theta", "seed",
    "sample_stride", "axial_substeps", "commute_mu",
}
_STR_KEYS = {"model", "potential", "data", "nonlinearity"}
_LIST_KEYS = {"eps_list", "mu_list"}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS | _LIST_KEYS

# keys consumed by experiment drivers rather than SimConfig
EXPERIMENT_KEYS = {
    "eps_list", "mu_list", "ref_dt", "t_dyadic", "smallness_delta",
    "commute_t", "commute_mu", "sample_interval",
}


def _parse_scalar(key, raw):
    try:
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key in _LIST_KEYS:
            return tuple(float(tok) for tok in raw.replace(",", " ").split())
    except ValueError:
        raise ValueError(f"config key {key!r}: cannot parse value {raw!r}") from None
    return raw


def parse_pairs(text):
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body or (body.startswith("[") and body.endswith("]")):
            continue
        if "=" not in body:
            raise ValueError(f"config line {lineno}: expected key=value, got {body!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ValueError(
                f"config line {lineno}: unknown key {key!r} "
                f"(known keys: {', '.join(sorted(KNOWN_KEYS))})"
            )
        pairs[key] = _parse_scalar(key, raw)
    return pairs


def _build_potential(pairs):
    kind = pairs.get("potential", "zero")
    if kind not in ("zero", "harmonic", "cosine"):
        raise ValueError(
            f"config key 'potential': {kind!r} not supported "
            "(zero | harmonic | cosine; tabulated potentials are API-only)"
        )
    return PotentialSpec(
        kind=kind,
        kappa=pairs.get("kappa", 1.0),
        amplitude=pairs.get("v_amplitude", 1.0),
    )


def parse_config(text):
    """Validated SimConfig with defaults filled (dt = eps^2/20 for the
    eps-model, theta-count threshold rule, cutoff 8, N_z 64, L_z 16)."""
    pairs = parse_pairs(text)
    model = pairs.get("model", "limit_nls")
    if model not in MODELS:
        raise ValueError(f"config key 'model': {model!r} not in {MODELS}")
    if model == "eps_nls" and "epsilon" not in pairs:
        raise ValueError("config key 'epsilon' is required when model=eps_nls")
    sigma = pairs.get("sigma", 1)
    if sigma not in SIGMAS:
        raise ValueError(f"config key 'sigma': {sigma} not in supported set {set(SIGMAS)}")
    lam = pairs.get("lambda", 1)
    if lam not in (-1, 1):
        raise ValueError(f"config key 'lambda': {lam} must be -1 or +1")
    nonlin = pairs.get("nonlinearity", "on")
    if nonlin not in ("on", "off"):
        raise ValueError(f"config key 'nonlinearity': {nonlin!r} must be on|off")
    data_params = {
        k: pairs[k] for k in ("zmod_k", "zmod_mix", "zmod_wave") if k in pairs
    }
    if "zmod_mix" in data_params:
        data_params["mix"] = data_params.pop("zmod_mix")
    experiment = {k: pairs[k] for k in EXPERIMENT_KEYS if k in pairs}
    try:
        cfg = SimConfig(
            model=model,
            eps=pairs.get("epsilon"),
            sigma=sigma,
            lam=lam,
            dt=pairs.get("dt"),
            t_final=pairs.get("t_final", 1.0),
            cutoff_degree=pairs.get("cutoff", 8),
            node_count=pairs.get("node_count"),
            n_z=pairs.get("n_z", 64),
            l_z=pairs.get("l_z", 16.0),
            potential=_build_potential(pairs),
            n_theta=pairs.get("n_theta"),
            data_name=pairs.get("data", "g1"),
            amplitude=pairs.get("amplitude", 1.0),
            seed=pairs.get("seed", 1234),
            data_params=data_params,
            sample_stride=pairs.get("sample_stride"),
            axial_substeps=pairs.get("axial_substeps", 1),
            nonlinearity_enabled=(nonlin == "on"),
            experiment_options=experiment,
        )
    except ValueError as err:
        raise ValueError(f"invalid configuration: {err}") from None
    return cfg


def config_fingerprint(cfg):
    """Stable digest of all run parameters, for the run manifest."""
    import hashlib

    parts = []
    for key in sorted(vars(cfg)):
        parts.append(f"{key}={vars(cfg)[key]!r}")
    return hashlib.sha256(";".join(parts).encode()).hexdigest()[:16]
