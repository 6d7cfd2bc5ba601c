import xml.etree.ElementTree as ET

import pytest

from mergemetrics import Barcode, Interval, elder_rule, random_tree
from mergemetrics.svg import render_svg

from conftest import tree_a, tree_c

NS = {"svg": "http://www.w3.org/2000/svg"}


def test_tree_svg_places_leaves_by_height():
    root = ET.fromstring(render_svg(tree_a()))
    leaves = root.findall(".//svg:circle[@class='leaf']", NS)
    by_height = {float(c.get("data-height")): float(c.get("cy")) for c in leaves}
    assert set(by_height) == {0.0, 1.0}
    # larger height is drawn higher up, i.e. at a smaller y
    assert by_height[1.0] < by_height[0.0]
    branch = root.find(".//svg:circle[@class='branch']", NS)
    assert float(branch.get("cy")) < by_height[1.0]
    assert root.find(".//svg:line[@class='ray']", NS).get("marker-end") == "url(#arrow)"


def test_barcode_svg_caps_infinite_bars():
    b = Barcode([Interval(0), Interval(1, 3)])
    root = ET.fromstring(render_svg(b))
    inf = root.findall(".//svg:line[@class='infinite']", NS)
    assert len(inf) == 1 and inf[0].get("marker-end") == "url(#arrow)"
    finite = root.findall(".//svg:line[@class='finite']", NS)
    assert len(finite) == 1 and finite[0].get("marker-end") is None
    # bars are horizontal
    assert all(line.get("y1") == line.get("y2") for line in inf + finite)


@pytest.mark.parametrize("obj", [tree_c(), elder_rule(tree_c()), random_tree(6, 2), Barcode()])
def test_svg_is_well_formed_and_deterministic(obj):
    text = render_svg(obj)
    ET.fromstring(text)
    assert text == render_svg(obj)


def test_render_rejects_other_objects():
    with pytest.raises(TypeError):
        render_svg("tree")
