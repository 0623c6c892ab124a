"""
Cheshire Duality Simulator
波動・粒子属性の分離（量子チェシャ猫）を弱値と虚時間発展で再現するシミュレーター
"""

__version__ = "1.0.0"
__author__ = "Cheshire Duality Simulator Team"
