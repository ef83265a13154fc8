import random
import unittest
from fractions import Fraction

from homfly_product.algebra import RatFunc, expand_qseries, qnum, vnum
from homfly_product.partitions import Partition, PartitionVector, partition_vectors_upto
from homfly_product.series import (
    BadConstantTerm,
    ComponentMismatch,
    Direction,
    PSeries,
    SchurCoeffs,
    adams_qt,
    adams_x,
    exp_series,
    log_series,
    power_to_schur,
    schur_to_power,
    specialize_qrho,
    transform_T,
    transformation_matrix,
)


def k(text: str) -> PartitionVector:
    return PartitionVector.parse(text)


def random_coeffs(rng: random.Random, components: int, degree: int) -> dict:
    return {
        key: Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        for key in partition_vectors_upto(components, degree)
    }


class TestBasisChange(unittest.TestCase):
    def test_degree_one(self):
        p = schur_to_power(SchurCoeffs(1, 1, {k("1"): 5}))
        self.assertEqual(p.coefficient(k("1")), 5)

    def test_s2(self):
        s2 = schur_to_power(SchurCoeffs(1, 2, {k("2"): 1}))
        self.assertEqual(s2.raw(k("1,1")), Fraction(1, 2))
        self.assertEqual(s2.raw(k("2")), Fraction(1, 2))

        s11 = schur_to_power(SchurCoeffs(1, 2, {k("1,1"): 1}))
        self.assertEqual(s11.raw(k("1,1")), Fraction(1, 2))
        self.assertEqual(s11.raw(k("2")), Fraction(-1, 2))

    def test_inverse_pair(self):
        rng = random.Random(7)
        for components, degree in ((1, 4), (2, 3)):
            coeffs = random_coeffs(rng, components, degree)
            coeffs[partition_vectors_upto(components, 1)[0]] = RatFunc(vnum(1), qnum(1))
            s = SchurCoeffs(components, degree, coeffs)
            self.assertEqual(power_to_schur(schur_to_power(s)), s)
            p = PSeries(components, degree, coeffs)
            self.assertEqual(schur_to_power(power_to_schur(p)), p)

    def test_components_independent(self):
        # s_(1) on each component is p_(1) on each component
        p = schur_to_power(SchurCoeffs(2, 2, {k("1|1"): 3}))
        self.assertEqual(p.coeffs, {k("1|1"): RatFunc(3)})


class TestLogExp(unittest.TestCase):
    def test_linear_term(self):
        z = PSeries(1, 3, {k("1"): 3}, 1)
        f = log_series(z)
        self.assertEqual(f.coefficient(k("1")), 3)
        self.assertEqual(f.coefficient(k("1,1")), -9)
        self.assertEqual(f.raw(k("1,1")), Fraction(-9, 2))

    def test_second_order(self):
        a, b, c = Fraction(2), Fraction(-1, 3), Fraction(5)
        f = log_series(PSeries(1, 2, {k("1"): a, k("1,1"): b, k("2"): c}, 1))
        self.assertEqual(f.coefficient(k("1,1")), b - a**2)
        self.assertEqual(f.coefficient(k("2")), c)

    def test_trivial(self):
        self.assertEqual(log_series(PSeries.one(1, 3)), PSeries(1, 3))
        self.assertEqual(exp_series(PSeries(2, 3)), PSeries.one(2, 3))

    def test_bad_constant(self):
        with self.assertRaises(BadConstantTerm):
            log_series(PSeries(1, 2, {k("1"): 1}))
        with self.assertRaises(BadConstantTerm):
            exp_series(PSeries(1, 2, {k("1"): 1}, 1))

    def test_roundtrips(self):
        rng = random.Random(11)
        for components, degree in ((1, 4), (2, 3)):
            coeffs = random_coeffs(rng, components, degree)
            coeffs[partition_vectors_upto(components, 1)[0]] = RatFunc(1, qnum(1))
            z = PSeries(components, degree, coeffs, 1)
            self.assertEqual(exp_series(log_series(z)), z)
            f = PSeries(components, degree, coeffs)
            self.assertEqual(log_series(exp_series(f)), f)

    def test_debug_logging(self):
        z = PSeries(1, 2, {k("1"): 3}, 1)
        with self.assertLogs("homfly_product.series", level="DEBUG") as logs:
            exp_series(log_series(z))
            power_to_schur(z)
        self.assertEqual(
            logs.output,
            [
                "DEBUG:homfly_product.series:log of a 1 component series to degree 2",
                "DEBUG:homfly_product.series:exp of a 1 component series to degree 2",
                "DEBUG:homfly_product.series:Power sums to Schur: 1 keys up to degree 2",
            ],
        )

    def test_component_mismatch(self):
        with self.assertRaises(ComponentMismatch):
            PSeries(1, 2, {k("1"): 1}) + PSeries(2, 2, {k("1|-"): 1})
        with self.assertRaises(ComponentMismatch):
            PSeries(1, 2, {k("1|1"): 1})


class TestAdams(unittest.TestCase):
    def test_adams_x(self):
        p = PSeries(1, 6, {k("2,1"): 3})
        scaled = adams_x(p, 2)
        self.assertEqual(scaled.keys(), [k("4,2")])
        self.assertEqual(scaled.coefficient(k("4,2")), 12)
        self.assertEqual(scaled.raw(k("4,2")), p.raw(k("2,1")))
        self.assertFalse(scaled.truncated)

    def test_adams_x_identity(self):
        p = PSeries(1, 3, {k("1"): 1, k("2,1"): RatFunc(1, qnum(2))})
        self.assertEqual(adams_x(p, 1), p)

    def test_adams_x_truncation(self):
        scaled = adams_x(PSeries(1, 3, {k("1"): 1, k("2"): 1}), 2)
        self.assertEqual(scaled.keys(), [k("2")])
        self.assertTrue(scaled.truncated)

    def test_adams_qt(self):
        p = adams_qt(PSeries(1, 2, {k("1"): RatFunc(1, qnum(1))}), 2)
        self.assertEqual(p.coefficient(k("1")), RatFunc(1, qnum(2)))

    def test_commute(self):
        p = PSeries(2, 4, {k("1|-"): RatFunc(vnum(1), qnum(1)), k("1|1"): RatFunc(1, qnum(3))})
        self.assertEqual(adams_qt(adams_x(p, 2), 2), adams_x(adams_qt(p, 2), 2))


class TestSpecialize(unittest.TestCase):
    def test_examples(self):
        c = RatFunc(vnum(1))
        p = specialize_qrho(PSeries(1, 4, {k("1"): c, k("2,2"): c}), Direction.Y_TO_X)
        self.assertEqual(p.coefficient(k("1")), c / qnum(1))
        self.assertEqual(p.coefficient(k("2,2")), c / (qnum(2) * qnum(2)))

    def test_inverse(self):
        rng = random.Random(3)
        p = PSeries(2, 3, random_coeffs(rng, 2, 3))
        there = specialize_qrho(p, Direction.Y_TO_X)
        self.assertEqual(specialize_qrho(there, Direction.X_TO_Y), p)

    def test_offset_growth(self):
        p = PSeries(1, 3, {key: 1 for key in partition_vectors_upto(1, 3)})
        for key, c in specialize_qrho(p, Direction.Y_TO_X).items():
            self.assertGreaterEqual(expand_qseries(c, 4).offset, key.size)


class TestTransform(unittest.TestCase):
    def test_degree_one(self):
        block = transformation_matrix(1)
        self.assertEqual(block[(Partition((1,)), Partition((1,)))], RatFunc(1, qnum(1)))
        inverse = transformation_matrix(1, inverse=True)
        self.assertEqual(inverse[(Partition((1,)), Partition((1,)))], RatFunc(qnum(1)))

    def test_matrix_matches_transform(self):
        block = transformation_matrix(3)
        for (a, b), value in block.items():
            image = transform_T(SchurCoeffs(1, 3, {PartitionVector((a,)): 1}))
            self.assertEqual(image.coefficient(PartitionVector((b,))), value)

    def test_block_inverse(self):
        forward, backward = transformation_matrix(2), transformation_matrix(2, inverse=True)
        shapes = [Partition((2,)), Partition((1, 1))]
        for a in shapes:
            for c in shapes:
                total = sum(
                    (forward[(a, b)] * backward[(b, c)] for b in shapes), RatFunc()
                )
                self.assertEqual(total, 1 if a == c else 0)

    def test_roundtrip(self):
        rng = random.Random(5)
        s = SchurCoeffs(1, 4, random_coeffs(rng, 1, 4))
        self.assertEqual(transform_T(transform_T(s), inverse=True), s)
        self.assertEqual(transform_T(transform_T(s, inverse=True)), s)

    def test_only_qrho(self):
        with self.assertRaises(ValueError):
            transform_T(SchurCoeffs(1, 1), at_qrho=False)


if __name__ == "__main__":
    unittest.main()
