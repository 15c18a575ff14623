import math
from typing import List, Optional, Tuple
from ..geometry import canonical_angle


class CoincidencePair:
    """
    Two distinct poses giving the same projected image.
    """

    def __init__(self, theta1: float, theta2: float, image_rms: float):
        self.theta1 = canonical_angle(theta1)
        self.theta2 = canonical_angle(theta2)
        if self.theta1 == self.theta2:
            raise ValueError("Coincidence needs distinct poses, got {} twice!".format(self.theta1))
        if not image_rms >= 0.0:
            raise ValueError("Image distance must be non-negative, got {}!".format(image_rms))
        self.image_rms = float(image_rms)

    @property
    def separation(self) -> float:
        """
        Circular distance between the two poses, in [0, pi]
        """
        delta = abs(self.theta2 - self.theta1)

        return min(delta, 2.0 * math.pi - delta)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoincidencePair):
            return NotImplemented

        return (self.theta1, self.theta2, self.image_rms) == (other.theta1, other.theta2, other.image_rms)

    def __str__(self) -> str:
        return "{:.4f} deg ~ {:.4f} deg (rms {:.3g})".format(
            math.degrees(self.theta1), math.degrees(self.theta2), self.image_rms
        )


class StarViolation:
    """
    A coincidence that breaks apart after both poses are rotated further by theta3.
    """

    def __init__(self, pair: CoincidencePair, theta3: float, image_rms: float):
        self.pair = pair
        self.theta3 = canonical_angle(theta3)
        self.image_rms = float(image_rms)

    def __str__(self) -> str:
        return "{} broken by {:.4f} deg (rms {:.3g})".format(self.pair, math.degrees(self.theta3), self.image_rms)


class PermutationWitness:
    """
    Solution of r_i cos(phi_i + theta1) = r_s(i) cos(phi_s(i) + theta2) for all points i,
    with s a mass preserving permutation.
    """

    def __init__(self, sigma: Tuple[int, ...], theta1: float, theta2: float, max_residual: float):
        self.sigma = tuple(int(s) for s in sigma)
        self.theta1 = canonical_angle(theta1)
        self.theta2 = canonical_angle(theta2)
        self.max_residual = float(max_residual)

    def is_identity_permutation(self) -> bool:
        return self.sigma == tuple(range(len(self.sigma)))

    def __str__(self) -> str:
        return "sigma={} theta1={:.6f} deg theta2={:.6f} deg (residual {:.3g})".format(
            list(self.sigma), math.degrees(self.theta1), math.degrees(self.theta2), self.max_residual
        )


class CompatibilityVerdict:
    """
    Outcome of checking a volume for (*) and (**).
    None in satisfies_star or satisfies_injectivity means the check didn't decide it.
    Grid verdicts are claims at the stated resolution, not proofs.
    """

    def __init__(self, method: str, resolution: int, tolerance: Optional[float] = None,
                 satisfies_star: Optional[bool] = None, satisfies_injectivity: Optional[bool] = None,
                 coincidences: Optional[List[CoincidencePair]] = None,
                 star_violations: Optional[List[StarViolation]] = None,
                 permutation_witness: Optional[PermutationWitness] = None):
        self.method = method
        self.resolution = resolution
        self.tolerance = tolerance
        self.coincidences = list(coincidences) if coincidences else []
        self.star_violations = list(star_violations) if star_violations else []
        self.permutation_witness = permutation_witness

        # Lemma: injectivity implies (*)
        if satisfies_injectivity and satisfies_star is None:
            satisfies_star = True
        if satisfies_injectivity and self.coincidences:
            raise ValueError("Injective verdict cannot carry coincidences!")
        if satisfies_injectivity and not satisfies_star:
            raise ValueError("Injective verdict must satisfy (*)!")
        if satisfies_star is not None and bool(self.star_violations) == bool(satisfies_star):
            raise ValueError("Star violations and (*) verdict disagree!")
        self.satisfies_star = satisfies_star
        self.satisfies_injectivity = satisfies_injectivity

    @property
    def is_compatible(self) -> bool:
        """
        Pose can be recovered from the image: (**) holds.
        """
        return bool(self.satisfies_injectivity)

    def report_lines(self, max_items: int = 10) -> List[str]:
        lines = [
            "method={}".format(self.method),
            "resolution={}".format(self.resolution),
        ]
        if self.tolerance is not None:
            lines.append("tolerance={:.17g}".format(self.tolerance))
        lines.append("satisfies_star={}".format(_tristate(self.satisfies_star)))
        lines.append("satisfies_injectivity={}".format(_tristate(self.satisfies_injectivity)))
        lines.append("coincidence_count={}".format(len(self.coincidences)))
        for pair in self.coincidences[:max_items]:
            lines.append("coincidence: {}".format(pair))
        lines.append("star_violation_count={}".format(len(self.star_violations)))
        for violation in self.star_violations[:max_items]:
            lines.append("star_violation: {}".format(violation))
        if self.permutation_witness is not None:
            lines.append("permutation_witness: {}".format(self.permutation_witness))

        return lines

    def __str__(self) -> str:
        return "\n".join(self.report_lines())


def _tristate(value: Optional[bool]) -> str:
    if value is None:
        return "unknown"

    return "true" if value else "false"
