"""
--- SubRiem ---

The facade behind the command line: merges settings, resolves the points
to work on and builds the report of every command as a JSON compatible
dict. Reports always carry `command`, `spec` and `spec_digest`.

License:  Apache-2.0 license
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Final, Optional, Dict, Any, List, Sequence, Callable, Tuple, Union

import numpy as np

try:
    from src.SubRiem.expr import ExprNode, to_source
    from src.SubRiem.manifold import ManifoldSpec, Point, with_vertical_scaling, with_sample_points
    from src.SubRiem.geometry import (
        CoefField, sum_of_squares, lv_coefficients, div_grad_h, div_grad_riemannian,
        equality_residual, x_delta, horizontal_frame_form, apply_operator
    )
    from src.SubRiem.flow import PhaseState, flow_trajectory, default_sampler, lv_definitional
    from src.SubRiem.lie import (
        HaarOperator, haar_path_discrepancy, jacobi_defect, left_invariance_defect,
        unimodularity_report
    )
    from src.SubRiem.baseproperties import BaseProperties
    from src.SubRiem.templatecache import TemplateCache
    from src.SubRiem.utils.cons import (
        OPERATOR_TOLERANCE, LEFT_INVARIANCE_TOLERANCE, DEFAULT_FLOW_STEPS,
        DEFAULT_SAMPLE_COUNT, DEFAULT_STEP_SIZE, DEFAULT_SEED, OPERATOR_NAMES
    )
    from src.SubRiem.utils.errors import MissingInputError, SpecError, NotASubLaplacianError
    from src.SubRiem.utils.utils import get_thread_count, max_abs
except ImportError:
    from expr import ExprNode, to_source
    from manifold import ManifoldSpec, Point, with_vertical_scaling, with_sample_points
    from geometry import (
        CoefField, sum_of_squares, lv_coefficients, div_grad_h, div_grad_riemannian,
        equality_residual, x_delta, horizontal_frame_form, apply_operator
    )
    from flow import PhaseState, flow_trajectory, default_sampler, lv_definitional
    from lie import (
        HaarOperator, haar_path_discrepancy, jacobi_defect, left_invariance_defect,
        unimodularity_report
    )
    from baseproperties import BaseProperties
    from templatecache import TemplateCache
    from utils.cons import (
        OPERATOR_TOLERANCE, LEFT_INVARIANCE_TOLERANCE, DEFAULT_FLOW_STEPS,
        DEFAULT_SAMPLE_COUNT, DEFAULT_STEP_SIZE, DEFAULT_SEED, OPERATOR_NAMES
    )
    from utils.errors import MissingInputError, SpecError, NotASubLaplacianError
    from utils.utils import get_thread_count, max_abs


DEFAULT_SETTINGS: Final[Dict[str, Union[str, int, float, bool, None]]] = {
    # Verdicts
    "tolerance": OPERATOR_TOLERANCE,

    # Parallelism, None uses min(4, cpu count); SUBRIEM_THREADS caps either
    "threads": None,

    # Flow and definitional L^V
    "steps": DEFAULT_FLOW_STEPS, "sample_every": None,
    "samples": DEFAULT_SAMPLE_COUNT, "h": DEFAULT_STEP_SIZE, "seed": DEFAULT_SEED,
    "richardson": False,

    # Overrides the spec's vertical scaling λ when set
    "vertical_scaling": None
}

TEXT_DIGITS: Final[int] = 10


def _format_number(value: Optional[float]) -> str:
    if value is None:
        return "null"

    return format(float(value), f".{TEXT_DIGITS}g")


def _format_array(values: Any) -> str:
    if values is None:
        return "null"

    array = np.asarray(values, dtype = float)
    if array.ndim == 0:
        return _format_number(float(array))

    if array.ndim == 1:
        return "(" + ", ".join(_format_number(value) for value in array) + ")"

    return "[" + "; ".join(_format_array(row) for row in array) + "]"


class SubRiem(BaseProperties):
    """
    Computes the reports of one command on one spec.
    """


    def __init__(self, spec: ManifoldSpec, default_settings: Optional[dict] = None,
                 command: str = "") -> None:
        """
        Args:
            spec (ManifoldSpec): The spec to work on.
            default_settings (Optional[dict]): Overrides of DEFAULT_SETTINGS.
            command (str): The command name written into every report.
        """

        settings = self._normalize_default_settings(default_settings)
        if settings["vertical_scaling"] is not None:
            spec = with_vertical_scaling(spec, settings["vertical_scaling"])

        super().__init__(spec, command)
        self.default_settings = settings


    @staticmethod
    def _normalize_default_settings(default_settings: Optional[dict] = None) -> dict:
        """
        Normalize the default settings by merging them with the provided settings.

        Args:
            default_settings (Optional[dict]): A dictionary of settings to be
                merged with the predefined settings. If None or not a dictionary,
                the predefined settings are returned.

        Returns:
            dict: A dictionary containing the normalized settings.
        """

        if not isinstance(default_settings, dict):
            return DEFAULT_SETTINGS.copy()

        new_default_settings = DEFAULT_SETTINGS.copy()
        new_default_settings.update(
            {key: value for key, value in default_settings.items() if value is not None}
        )

        return new_default_settings


    @property
    def settings(self) -> dict:
        return self.default_settings


    def _header(self) -> dict:
        return {
            "command": self.command,
            "spec": self.spec.name,
            "spec_digest": self.spec_digest
        }


    def _points(self, points: Optional[Sequence[Sequence[float]]] = None) -> List[Point]:
        """
        The points to evaluate: `points` when given, else the sample points.

        Raises:
            SpecError: If a given point has the wrong length.
            MissingInputError: If there is no point at all.
        """

        if points is not None:
            resolved = list(with_sample_points(self.spec, points).sample_points)
        else:
            resolved = list(self.spec.sample_points)

        if not resolved:
            raise MissingInputError(f"'{self.spec.name}' has no sample points, pass --point")

        return resolved


    def _map_points(self, func: Callable[[Point], Any], points: List[Point]) -> list:
        """
        Per-point work on the thread pool; results keep the order of `points`.
        """

        threads = get_thread_count(self.settings["threads"])
        if threads == 1 or len(points) == 1:
            return [func(point) for point in points]

        with ThreadPoolExecutor(max_workers = threads) as executor:
            return list(executor.map(func, points))


    def parse_tau(self, tau: Optional[Union[str, ExprNode]], required_by: str) -> ExprNode:
        """
        Parse a density given on the command line or by name.

        Args:
            tau (Optional[Union[str, ExprNode]]): An expression, the name of a
                                                  declared density or a parsed node.
            required_by (str): What needs it, for the error message.

        Raises:
            MissingInputError: If tau is None.
            SpecError: If the expression does not parse.
        """

        if tau is None:
            raise MissingInputError(f"{required_by} requires --tau")

        if isinstance(tau, ExprNode):
            return tau

        if tau in self.spec.density_names:
            return self.spec.density(tau)

        return self.spec.parse(tau)


    def operator(self, name: str, x: Sequence[float],
                 tau: Optional[ExprNode] = None) -> Tuple[CoefField, Optional[np.ndarray]]:
        """
        Coefficients of a named operator at x and the frame form of its X_Δ.

        Args:
            name (str): One of OPERATOR_NAMES.
            x (Sequence[float]): The point.
            tau (Optional[ExprNode]): The density for "divgrad".

        Returns:
            Tuple[CoefField, Optional[np.ndarray]]: The operator and the m frame
                components of X_Δ, for "lv" those of m·L^V. None when the
                operator is not a sub-Laplacian or X_Δ is not horizontal.
        """

        if name not in OPERATOR_NAMES:
            raise SpecError(f"unknown operator '{name}'")

        if name in ("haar-left", "haar-right"):
            haar = HaarOperator(self.spec, name.split("-")[1], self.lie_data)
            return haar.coefficients(x), haar.frame_first(x)

        scale = 1.0
        if name == "sos":
            coefficients = sum_of_squares(self.spec, x)
        elif name == "lv":
            coefficients = lv_coefficients(self.spec, x)
            scale = float(self.spec.horizontal_rank)
        elif name == "divgrad":
            coefficients = div_grad_h(self.spec, self.parse_tau(tau, "divgrad"), x)
        else:
            coefficients = div_grad_riemannian(self.spec, x)

        try:
            vector = x_delta(coefficients.scaled(scale), self.spec, x)
        except NotASubLaplacianError:
            return coefficients, None

        return coefficients, horizontal_frame_form(self.spec, x, vector)


    def coeffs_report(self, operator: str, tau: Optional[str] = None,
                      points: Optional[Sequence[Sequence[float]]] = None) -> dict:
        """
        Local coefficients of an operator at every point.

        Args:
            operator (str): One of OPERATOR_NAMES.
            tau (Optional[str]): Density expression, required by "divgrad".
            points (Optional[Sequence[Sequence[float]]]): Overrides the sample points.

        Returns:
            dict: The report, one {point, second, first, frame_first} per point.
        """

        if operator not in OPERATOR_NAMES:
            raise SpecError(f"unknown operator '{operator}'")

        tau_node = self.parse_tau(tau, "divgrad") if operator == "divgrad" else None
        if operator == "haar-right" and self.spec.modular_inverse is None:
            raise MissingInputError(f"haar-right requires modular_inverse in '{self.spec.name}'")

        self.run_logger.log(command = self.command, spec = self.spec.name, operator = operator)

        def evaluate_point(point: Point) -> dict:
            coefficients, frame_first = self.operator(operator, point, tau_node)
            return {
                "point": list(point),
                "second": coefficients.second,
                "first": coefficients.first,
                "frame_first": frame_first
            }

        report = self._header()
        report.update({
            "operator": operator,
            "tau": None if tau_node is None else to_source(tau_node),
            "vertical_scaling": self.spec.vertical_scaling,
            "points": self._map_points(evaluate_point, self._points(points))
        })

        return report


    def check_report(self, tau: Optional[str], tolerance: Optional[float] = None,
                     points: Optional[Sequence[Sequence[float]]] = None) -> dict:
        """
        Evaluate the criterion for m·L^V = div^ω grad_H with ω = τ dx.

        Args:
            tau (Optional[str]): The density expression or declared density name.
            tolerance (Optional[float]): Pass threshold on the max-norm of the residual.
            points (Optional[Sequence[Sequence[float]]]): Overrides the sample points.

        Returns:
            dict: Per-point residuals with clause diagnostics, `max_residual`
                  and `verdict` ("pass" or "fail").
        """

        tau_node = self.parse_tau(tau, "check")
        tolerance = self.settings["tolerance"] if tolerance is None else tolerance

        self.run_logger.log(command = self.command, spec = self.spec.name, tolerance = tolerance)

        residuals = self._map_points(
            lambda point: equality_residual(self.spec, tau_node, point), self._points(points)
        )

        maximum = max(max_abs(residual.residual) for residual in residuals)
        clauses = {
            "volume_clause_holds":
                all(residual.volume_clause_holds(tolerance) for residual in residuals),
            "volume_clause_summed_holds":
                all(residual.volume_clause_summed_holds(tolerance) for residual in residuals),
            "projection_clause_holds":
                all(residual.projection_clause_holds(tolerance) for residual in residuals),
            "sufficient_pair_holds":
                all(residual.sufficient_pair_holds(tolerance) for residual in residuals)
        }

        report = self._header()
        report.update({
            "tau": to_source(tau_node),
            "tolerance": tolerance,
            "points": [residual.to_dict(tolerance) for residual in residuals],
            "max_residual": maximum,
            "verdict": "pass" if maximum <= tolerance else "fail",
            "clauses": clauses
        })

        return report


    def flow_report(self, x: Optional[Sequence[float]], p: Optional[Sequence[float]],
                    t: Optional[float], steps: Optional[int] = None,
                    sample_every: Optional[int] = None) -> dict:
        """
        Integrate the Hamilton-Jacobi flow and report sampled states and
        the drift of H.

        Raises:
            MissingInputError: If x, p or t is missing.
            SpecError: If x or p has the wrong length.
            FlowDomainError: If the trajectory leaves the domain.
        """

        for name, value in (("--x", x), ("--p", p), ("--t", t)):
            if value is None:
                raise MissingInputError(f"flow requires {name}")

        dimension = self.spec.dimension
        for name, value in (("--x", x), ("--p", p)):
            if len(value) != dimension:
                raise SpecError(f"{name}: expected {dimension} numbers, got {len(value)}")

        steps = self.settings["steps"] if steps is None else steps
        sample_every = self.settings["sample_every"] if sample_every is None else sample_every
        if steps < 1:
            raise SpecError("--steps: expected a positive integer")

        self.run_logger.log(command = self.command, spec = self.spec.name, t = t, steps = steps)

        trajectory = flow_trajectory(
            self.spec, PhaseState(np.array(x, dtype = float), np.array(p, dtype = float)),
            float(t), int(steps), sample_every
        )

        report = self._header()
        report.update({
            "x0": list(x),
            "p0": list(p),
            "t": float(t),
            "steps": int(steps),
            "states": [
                {"t": time, "x": state.x, "p": state.p, "energy": energy}
                for time, state, energy in zip(
                    trajectory.times, trajectory.states, trajectory.energies
                )
            ],
            "energy_initial": trajectory.energies[0],
            "energy_final": trajectory.energies[-1],
            "max_drift": trajectory.max_drift
        })

        return report


    def lvdef_report(self, f: Optional[str],
                     points: Optional[Sequence[Sequence[float]]] = None) -> dict:
        """
        Estimate L^V f from its definition and compare it with the local formula.

        Args:
            f (Optional[str]): The test function.
            points (Optional[Sequence[Sequence[float]]]): Overrides the sample points.

        Returns:
            dict: One {point, estimate, local_value, abs_error} per point and
                  `max_abs_error`.
        """

        if f is None:
            raise MissingInputError("lvdef requires --f")

        function = self.spec.parse(f)
        settings = self.settings
        sampler = default_sampler(self.spec, int(settings["samples"]), int(settings["seed"]))

        self.run_logger.log(
            command = self.command, spec = self.spec.name,
            rule = sampler.rule, samples = sampler.count
        )

        results = []
        for point in self._points(points):
            estimate = lv_definitional(
                self.spec, point, function, sampler, float(settings["h"]),
                int(settings["steps"]), bool(settings["richardson"]), settings["threads"]
            )
            local_value = apply_operator(lv_coefficients(self.spec, point), function, point)
            results.append({
                "point": list(point),
                "estimate": estimate,
                "local_value": local_value,
                "abs_error": abs(estimate - local_value)
            })

        report = self._header()
        report.update({
            "f": to_source(function),
            "rule": sampler.rule,
            "samples": sampler.count,
            "seed": sampler.seed,
            "h": float(settings["h"]),
            "steps": int(settings["steps"]),
            "richardson": bool(settings["richardson"]),
            "points": results,
            "max_abs_error": max(result["abs_error"] for result in results)
        })

        return report


    def lie_report(self) -> dict:
        """
        Group data of a left-invariant frame: structure constants, traces,
        unimodularity and the agreement of both forms of the Haar operators.

        Raises:
            MissingInputError: If the spec declares no identity_point.
        """

        data = self.lie_data
        self.run_logger.log(command = self.command, spec = self.spec.name)

        unimodularity = unimodularity_report(self.spec, data)
        defect = left_invariance_defect(self.spec, seed = int(self.settings["seed"]), data = data)

        discrepancies = {"left": haar_path_discrepancy(self.spec, "left", data)}
        if self.spec.modular_inverse is not None:
            discrepancies["right"] = haar_path_discrepancy(self.spec, "right", data)

        report = self._header()
        report.update({
            "identity_point": list(data.identity_point),
            "structure_constants": data.structure_constants,
            "trace_ad": data.trace_ad,
            "jacobi_defect": jacobi_defect(data.structure_constants),
            "left_invariance_defect": defect,
            "left_invariant": defect <= LEFT_INVARIANCE_TOLERANCE,
            "unimodular": unimodularity.unimodular,
            "horizontal_unimodular": unimodularity.horizontal_unimodular,
            "asymmetry": unimodularity.asymmetry,
            "x_delta_left_frame": unimodularity.x_delta_left_frame,
            "x_delta_right_frame": unimodularity.x_delta_right_frame,
            "haar_path_discrepancy": discrepancies,
            "appendixA_max_discrepancy": max(discrepancies.values())
        })

        return report


def render_text(report: dict, template_cache: Optional[TemplateCache] = None) -> str:
    """
    Render a report with the template of its command.

    Args:
        report (dict): A report built by SubRiem.
        template_cache (Optional[TemplateCache]): The templates, loaded when omitted.

    Returns:
        str: The human readable report.
    """

    template_cache = template_cache if template_cache is not None else TemplateCache()
    command = report.get("command", "")

    replaces = {
        "spec": report.get("spec", ""),
        "spec_digest": report.get("spec_digest", "")
    }

    if command == "coeffs":
        replaces.update({
            "operator": report["operator"],
            "tau": report["tau"] or "",
            "has_tau": report["tau"] is not None,
            "points": "\n".join(
                f"  at {_format_array(entry['point'])}\n"
                f"    second      = {_format_array(entry['second'])}\n"
                f"    first       = {_format_array(entry['first'])}\n"
                f"    frame_first = {_format_array(entry['frame_first'])}"
                for entry in report["points"]
            )
        })
    elif command == "check":
        replaces.update({
            "tau": report["tau"],
            "tolerance": _format_number(report["tolerance"]),
            "verdict": report["verdict"].upper(),
            "max_residual": _format_number(report["max_residual"]),
            "sufficient_pair": report["clauses"]["sufficient_pair_holds"],
            "points": "\n".join(
                f"  at {_format_array(entry['point'])}: residual {_format_array(entry['residual'])}"
                for entry in report["points"]
            )
        })
    elif command == "flow":
        replaces.update({
            "t": _format_number(report["t"]),
            "steps": report["steps"],
            "x0": _format_array(report["x0"]),
            "p0": _format_array(report["p0"]),
            "x_final": _format_array(report["states"][-1]["x"]),
            "p_final": _format_array(report["states"][-1]["p"]),
            "energy_initial": _format_number(report["energy_initial"]),
            "energy_final": _format_number(report["energy_final"]),
            "max_drift": _format_number(report["max_drift"])
        })
    elif command == "lvdef":
        replaces.update({
            "f": report["f"],
            "rule": report["rule"],
            "samples": report["samples"],
            "max_abs_error": _format_number(report["max_abs_error"]),
            "points": "\n".join(
                f"  at {_format_array(entry['point'])}: estimate {_format_number(entry['estimate'])}, "
                f"local {_format_number(entry['local_value'])}, "
                f"error {_format_number(entry['abs_error'])}"
                for entry in report["points"]
            )
        })
    elif command == "lie":
        replaces.update({
            "trace_ad": _format_array(report["trace_ad"]),
            "unimodular": "yes" if report["unimodular"] else "no",
            "x_delta_left_frame": _format_array(report["x_delta_left_frame"]),
            "x_delta_right_frame": _format_array(report["x_delta_right_frame"]),
            "has_right": report["x_delta_right_frame"] is not None,
            "asymmetry": report["asymmetry"],
            "left_invariance_defect": _format_number(report["left_invariance_defect"]),
            "discrepancy": _format_number(report["appendixA_max_discrepancy"]),
            "brackets": "\n".join(
                f"  [X{i + 1}, X{j + 1}] = {_format_array(report['structure_constants'][i][j])}"
                for i in range(len(report["structure_constants"]))
                for j in range(i + 1, len(report["structure_constants"]))
            )
        })
    elif command == "catalog":
        replaces.update({
            "entries": "\n".join(
                f"  {entry['name']}: d = {entry['dimension']}, m = {entry['horizontal_rank']}"
                + (f" -> {entry['file']}" if entry.get("file") else "")
                for entry in report["entries"]
            )
        })

    return template_cache.render(command, **replaces)


if __name__ == "__main__":
    print("subriem.py: This file is not designed to be executed.")
