# -*- coding: utf-8 -*-
"""
持久化模块

问题实例、参数规划、轨迹CSV与迭代点JSON的读写。
"""
