# -*- coding: utf-8 -*-
"""
诊断模块

沿轨迹检查收敛界与单步不等式，拟合经验收敛率。
"""
