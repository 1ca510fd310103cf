"""
Pipelines package initialization.
Each module registers one experiment pipeline; they run in list order.
"""
from gl3lab.pipelines.hecke import hecke
from gl3lab.pipelines.voronoi import voronoi
from gl3lab.pipelines.lemma51 import lemma51
from gl3lab.pipelines.meansquare import meansquare
from gl3lab.pipelines.discrepancy import discrepancy
from gl3lab.pipelines.moments import moments
from gl3lab.pipelines.tails import tails
from gl3lab.pipelines.laplace import laplace

# List of all pipelines in dependency order
all_pipelines = [hecke, voronoi, lemma51, meansquare, discrepancy, moments, tails, laplace]
